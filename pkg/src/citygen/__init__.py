"""citygen: settlement generation for voxel heightmap worlds."""

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
)

__all__ = [
    "Edit",
    "TerrainClass",
    "VoxelWorld",
    "WorldFormatError",
    "cell_cost",
    "classify_terrain",
    "flat_world",
    "generate_terrain",
    "load_world",
    "plain_ratio",
    "save_world",
]

__version__ = "0.1.0"
