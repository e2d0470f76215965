import numpy as np
import pytest

from citygen.world import (
    Edit,
    TerrainClass,
    VoxelWorld,
    WorldFormatError,
    cell_cost,
    classify_terrain,
    flat_world,
    generate_terrain,
    load_world,
    plain_ratio,
    save_world,
    terrain_class_grid,
)
from conftest import random_world


def classify_by_definition(world, x, z):
    """Straight transcription of the five-class precedence, cell by cell."""
    if world.artificial[x, z]:
        return TerrainClass.ARTIFICIAL
    for dx in (-1, 0, 1):
        for dz in (-1, 0, 1):
            nx, nz = x + dx, z + dz
            if world.in_bounds(nx, nz) and world.artificial[nx, nz]:
                return TerrainClass.AROUND_ARTIFICIAL
    if world.water[x, z]:
        return TerrainClass.WATER
    for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1)):
        if world.in_bounds(nx, nz) and world.altitude[nx, nz] != world.altitude[x, z]:
            return TerrainClass.COMMON_LAND
    return TerrainClass.PLAIN


class TestClassify:
    def test_water_cell(self):
        w = flat_world(5)
        w.water[2, 2] = True
        assert classify_terrain(w, (2, 2)) is TerrainClass.WATER

    def test_flat_neighborhood_is_plain(self):
        w = flat_world(5)
        assert classify_terrain(w, (2, 2)) is TerrainClass.PLAIN

    def test_diagonal_to_artificial_is_around(self):
        w = flat_world(5)
        w.artificial[2, 2] = True
        assert classify_terrain(w, (3, 3)) is TerrainClass.AROUND_ARTIFICIAL
        assert classify_terrain(w, (2, 2)) is TerrainClass.ARTIFICIAL
        assert classify_terrain(w, (4, 4)) is TerrainClass.PLAIN

    def test_artificial_beats_water(self):
        w = flat_world(5)
        w.water[2, 2] = True
        w.artificial[2, 2] = True
        assert classify_terrain(w, (2, 2)) is TerrainClass.ARTIFICIAL
        # neighbor water cell is around-artificial, not water
        w.water[2, 3] = True
        assert classify_terrain(w, (2, 3)) is TerrainClass.AROUND_ARTIFICIAL

    def test_out_of_bounds(self):
        w = flat_world(5)
        with pytest.raises(IndexError):
            classify_terrain(w, (5, 0))

    def test_exhaustive_and_matches_grid(self):
        # every cell gets exactly one class; vectorized grid agrees with the
        # cell-by-cell definition on randomized worlds
        for seed in range(20):
            w = random_world(seed, 8, water_p=0.15, artificial_p=0.1)
            grid = terrain_class_grid(w)
            for x in range(w.width):
                for z in range(w.length):
                    expected = classify_by_definition(w, x, z)
                    assert classify_terrain(w, (x, z)) is expected
                    assert grid[x, z] == {
                        TerrainClass.PLAIN: 0,
                        TerrainClass.COMMON_LAND: 1,
                        TerrainClass.WATER: 2,
                        TerrainClass.ARTIFICIAL: 3,
                        TerrainClass.AROUND_ARTIFICIAL: 4,
                    }[expected]


class TestCellCost:
    def test_water_costs_10(self):
        w = flat_world(5)
        w.water[1, 1] = True
        assert cell_cost(w, (1, 1)) == 10

    def test_artificial_costs_10000(self):
        w = flat_world(5)
        w.artificial[1, 1] = True
        assert cell_cost(w, (1, 1)) == 10000

    def test_around_artificial_costs_50(self):
        w = flat_world(5)
        w.artificial[1, 1] = True
        assert cell_cost(w, (2, 2)) == 50

    def test_plain_costs_0(self):
        w = flat_world(5)
        assert cell_cost(w, (2, 2)) == 0

    def test_common_land_costs_gradient(self):
        # neighbor differences (1, 2, 0, 1) sum to 4
        w = flat_world(5, altitude=5)
        w.altitude[3, 2] = 6   # +x neighbor: |5-6| = 1
        w.altitude[1, 2] = 3   # -x neighbor: |5-3| = 2
        w.altitude[2, 3] = 5   # +z neighbor: 0
        w.altitude[2, 1] = 4   # -z neighbor: |5-4| = 1
        assert cell_cost(w, (2, 2)) == 4

    def test_zero_cost_exactly_on_plain_for_natural_terrain(self):
        for seed in range(10):
            w = random_world(seed, 9, water_p=0.1)
            for x in range(w.width):
                for z in range(w.length):
                    cls = classify_terrain(w, (x, z))
                    if cls is TerrainClass.PLAIN:
                        assert cell_cost(w, (x, z)) == 0
                    elif cls is TerrainClass.COMMON_LAND:
                        assert cell_cost(w, (x, z)) > 0


class TestPlainRatio:
    def test_flat_world_is_all_plain(self):
        assert plain_ratio(flat_world(10)) == 1.0

    def test_all_water_is_zero(self):
        w = flat_world(10)
        w.water[:, :] = True
        assert plain_ratio(w) == 0.0

    def test_checkerboard_is_zero(self):
        alt = np.fromfunction(lambda x, z: (x + z) % 2, (10, 10)).astype(np.int64)
        assert plain_ratio(VoxelWorld(alt)) == 0.0


class TestGenerateTerrain:
    @pytest.mark.parametrize("size,target", [(100, 0.606), (150, 0.252)])
    def test_hits_target_band(self, size, target):
        w = generate_terrain(seed=1, size=size, target_plain_ratio=target,
                             water_fraction=0.05)
        assert target - 0.05 <= plain_ratio(w) <= target + 0.05

    def test_deterministic(self):
        a = generate_terrain(seed=7, size=48, target_plain_ratio=0.4, water_fraction=0.1)
        b = generate_terrain(seed=7, size=48, target_plain_ratio=0.4, water_fraction=0.1)
        assert a == b

    def test_different_seeds_differ(self):
        a = generate_terrain(seed=1, size=32, target_plain_ratio=0.4, water_fraction=0.0)
        b = generate_terrain(seed=2, size=32, target_plain_ratio=0.4, water_fraction=0.0)
        assert a != b

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            generate_terrain(seed=1, size=8, target_plain_ratio=0.5, water_fraction=0.0)

    def test_water_fraction_applied(self):
        w = generate_terrain(seed=3, size=64, target_plain_ratio=0.4, water_fraction=0.2)
        frac = w.water.mean()
        assert 0.1 <= frac <= 0.3


class TestWorldFile:
    def test_round_trip(self, tmp_path):
        w = generate_terrain(seed=5, size=32, target_plain_ratio=0.45, water_fraction=0.1)
        w.apply_edit(Edit(3, int(w.altitude[3, 4]), 4, "road"))
        path = tmp_path / "world.json"
        save_world(w, path)
        loaded = load_world(path)
        assert loaded == w
        assert plain_ratio(loaded) == plain_ratio(w)

    def test_truncated_file(self, tmp_path):
        w = flat_world(16)
        path = tmp_path / "world.json"
        save_world(w, path)
        data = path.read_text()
        path.write_text(data[: len(data) // 2])
        with pytest.raises(WorldFormatError):
            load_world(path)

    def test_version_mismatch(self, tmp_path):
        w = flat_world(16)
        path = tmp_path / "world.json"
        save_world(w, path)
        doc = path.read_text().replace('"version":1', '"version":99', 1)
        path.write_text(doc)
        with pytest.raises(WorldFormatError, match="version"):
            load_world(path)

    def test_bad_surface_string(self, tmp_path):
        w = flat_world(16)
        path = tmp_path / "world.json"
        save_world(w, path)
        doc = path.read_text().replace("ground:grass", "lava", 1)
        path.write_text(doc)
        with pytest.raises(WorldFormatError, match="surface"):
            load_world(path)


class TestEdits:
    def test_raise_and_repaint(self):
        w = flat_world(5, altitude=5)
        w.apply_edit(Edit(1, 5, 1, "road"))  # build on top
        assert w.altitude[1, 1] == 6
        assert w.artificial[1, 1]
        w2 = flat_world(5, altitude=5)
        w2.apply_edit(Edit(1, 4, 1, "sand"))  # repaint the top
        assert w2.altitude[1, 1] == 5
        assert w2.surface_at(1, 1) == "ground:sand"

    def test_air_lowers(self):
        w = flat_world(5, altitude=5)
        w.apply_edit(Edit(1, 4, 1, "air"))
        assert w.altitude[1, 1] == 4

    def test_air_wrong_height_rejected(self):
        w = flat_world(5, altitude=5)
        with pytest.raises(ValueError):
            w.apply_edit(Edit(1, 2, 1, "air"))

    def test_replay_reproduces_state(self):
        original = flat_world(6, altitude=5)
        work = original.copy()
        work.apply_edit(Edit(2, 5, 2, "wall_base"))
        work.apply_edit(Edit(2, 6, 2, "wall_plane"))
        work.apply_edit(Edit(3, 4, 3, "air"))
        work.apply_edit(Edit(3, 3, 3, "dirt"))
        assert work.replay_onto(original) == work
