import random

import numpy as np
import pytest

from citygen.world import VoxelWorld, flat_world


def random_world(seed, width=10, length=None, alt_lo=3, alt_hi=8,
                 water_p=0.0, artificial_p=0.0) -> VoxelWorld:
    """Small random world for oracle comparisons; deterministic per seed."""
    if length is None:
        length = width
    rng = random.Random(seed)
    alt = np.array([[rng.randint(alt_lo, alt_hi) for _ in range(length)]
                    for _ in range(width)], dtype=np.int64)
    water = np.array([[rng.random() < water_p for _ in range(length)]
                      for _ in range(width)])
    art = np.array([[rng.random() < artificial_p for _ in range(length)]
                    for _ in range(width)])
    return VoxelWorld(alt, water=water, artificial=art)


@pytest.fixture
def flat20():
    return flat_world(20, altitude=5)
