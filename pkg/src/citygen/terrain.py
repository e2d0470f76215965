"""Vegetation clearing and rule-based terrain reshaping.

Reshaping runs a single raster scan over the grid, comparing each cell's
altitude against its 4-neighbors on the *current* (mutating) map: a cell
higher than the neighborhood by a signed-comparison score of exactly +3 is
lowered one block, a score of exactly -3 raises it one block. Scores of
+-4 (isolated spikes/pits) are deliberately left alone.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from citygen.world import Edit, VoxelWorld


@dataclass
class ReshapeReport:
    lowered: int
    raised: int
    passes: int
    mean_altitude: float  # measured before the scan; informational only

    @property
    def edit_count(self) -> int:
        # lowering removes the top block and re-surfaces beneath (2 edits),
        # raising stacks one ground block (1 edit)
        return 2 * self.lowered + self.raised


def modal_ground_kind(world: VoxelWorld) -> str:
    """Most common ground kind among non-water, non-artificial columns."""
    mask = ~world.water & ~world.artificial
    kinds = world.ground_kind[mask]
    if kinds.size == 0:
        return "dirt"
    counts = Counter(kinds.tolist())
    top = max(counts.values())
    # ties break lexicographically for determinism
    return min(k for k, v in counts.items() if v == top)


def clear_vegetation(world: VoxelWorld):
    """Remove every vegetation column in place.

    Canopy blocks become air edits (one per block) and the exposed top is
    re-surfaced with the world's modal ground kind. Returns
    ``(world, removed_count)``; calling again is the identity.
    """
    gb = modal_ground_kind(world)
    removed = 0
    for x in range(world.width):
        for z in range(world.length):
            c = int(world.canopy[x, z])
            if c <= 0 or world.water[x, z] or world.artificial[x, z]:
                continue
            for _ in range(c):
                world.apply_edit(Edit(x, int(world.altitude[x, z]) - 1, z, "air"))
            world.apply_edit(Edit(x, int(world.altitude[x, z]) - 1, z, gb))
            removed += 1
    return world, removed


def compare_altitude(world: VoxelWorld, x: int, z: int) -> int:
    """Signed comparison of a cell against its existing 4-neighbors.

    Each strictly lower neighbor contributes +1, each strictly higher one
    -1; the result lies in [-4, 4] (border cells use fewer neighbors).
    """
    world.check_bounds(x, z)
    a = world.altitude
    h = int(a[x, z])
    score = 0
    for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1)):
        if world.in_bounds(nx, nz):
            n = int(a[nx, nz])
            if h > n:
                score += 1
            elif h < n:
                score -= 1
    return score


def reshape(world: VoxelWorld, repeat: bool = False):
    """Smooth near-outlier cells toward their neighborhoods, in place.

    One raster pass in (x, then z) order; the altitude map mutates as the
    scan proceeds, so later cells see earlier changes. Water and artificial
    cells are left untouched (reshaping re-surfaces with ground, which would
    silently drain lakes). With ``repeat=True`` passes run to a fixpoint.
    Returns ``(world, ReshapeReport)``.
    """
    gb = modal_ground_kind(world)
    mean_altitude = float(np.mean(world.altitude))
    lowered = raised = passes = 0
    while True:
        passes += 1
        changed = 0
        for x in range(world.width):
            for z in range(world.length):
                if world.water[x, z] or world.artificial[x, z]:
                    continue
                score = compare_altitude(world, x, z)
                a = int(world.altitude[x, z])
                if score == 3 and a >= 2:
                    world.apply_edit(Edit(x, a - 1, z, "air"))
                    world.apply_edit(Edit(x, a - 2, z, gb))
                    lowered += 1
                    changed += 1
                elif score == -3:
                    world.apply_edit(Edit(x, a, z, gb))
                    raised += 1
                    changed += 1
        if not repeat or changed == 0:
            break
    return world, ReshapeReport(lowered, raised, passes, mean_altitude)
