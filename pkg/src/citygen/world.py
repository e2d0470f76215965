"""Voxel heightmap world model: terrain classes, per-cell costs, synthetic
terrain generation and JSON (de)serialization.

A world is a column grid: one integer altitude per (x, z) cell, a surface
class on top of each column, an artificial-block mask and an append-only
edit log that can be replayed onto the original world.
"""

from __future__ import annotations

import json
import logging
from enum import Enum
from typing import NamedTuple

import numpy as np

log = logging.getLogger(__name__)

WORLD_FORMAT_VERSION = 1

# Per-cell placement cost by terrain class; common land uses its gradient.
WATER_COST = 10
PLAIN_COST = 0
ARTIFICIAL_COST = 10000
AROUND_ARTIFICIAL_COST = 50

# Block classes the generator writes. Applying one of these flips the
# artificial mask; any other non-"air" block is a natural ground kind.
_ARTIFICIAL_BLOCKS = {
    "road",
    "bridge",
    "streetlight",
    "wall_base",
    "wall_plane",
    "tower",
    "torch",
    "cannon",
}

_DEFAULT_CANOPY = 3


def _is_artificial_block(block: str) -> bool:
    return block in _ARTIFICIAL_BLOCKS or block.startswith("building:")


class TerrainClass(Enum):
    PLAIN = "plain"
    COMMON_LAND = "common_land"
    WATER = "water"
    ARTIFICIAL = "artificial"
    AROUND_ARTIFICIAL = "around_artificial"


class Edit(NamedTuple):
    """One block change: (x, z) column, height y, block class written."""

    x: int
    y: int
    z: int
    block: str


class WorldFormatError(ValueError):
    """A world file could not be parsed; the message names the bad field."""


class VoxelWorld:
    """Column grid with altitude, surface state and a replayable edit log.

    Surface state is held as separate arrays (water mask, canopy offsets for
    vegetation, ground kind, artificial mask); ``surface_at`` derives the
    single surface class string used in world files.
    """

    def __init__(self, altitude, water=None, canopy=None, ground_kind=None,
                 artificial=None, edits=None):
        self.altitude = np.asarray(altitude, dtype=np.int64)
        if self.altitude.ndim != 2:
            raise ValueError("altitude must be a 2-D grid")
        if (self.altitude < 0).any():
            raise ValueError("altitudes must be nonnegative")
        shape = self.altitude.shape
        self.water = _grid_or(water, shape, False, bool)
        self.canopy = _grid_or(canopy, shape, 0, np.int64)
        if ground_kind is None:
            ground_kind = np.full(shape, "grass", dtype="<U16")
        self.ground_kind = np.asarray(ground_kind, dtype="<U16")
        self.artificial = _grid_or(artificial, shape, False, bool)
        for name, grid in (("water", self.water), ("canopy", self.canopy),
                           ("ground_kind", self.ground_kind),
                           ("artificial", self.artificial)):
            if grid.shape != shape:
                raise ValueError(f"{name} grid shape {grid.shape} != altitude shape {shape}")
        self.edits: list[Edit] = list(edits) if edits else []

    @property
    def width(self) -> int:
        return self.altitude.shape[0]

    @property
    def length(self) -> int:
        return self.altitude.shape[1]

    def in_bounds(self, x: int, z: int) -> bool:
        return 0 <= x < self.width and 0 <= z < self.length

    def check_bounds(self, x: int, z: int):
        if not self.in_bounds(x, z):
            raise IndexError(f"cell ({x}, {z}) outside {self.width}x{self.length} world")

    def surface_at(self, x: int, z: int) -> str:
        """Surface class string for one cell, as stored in world files."""
        self.check_bounds(x, z)
        if self.artificial[x, z]:
            return "artificial"
        if self.water[x, z]:
            return "water"
        if self.canopy[x, z] > 0:
            return f"vegetation:{int(self.canopy[x, z])}"
        return f"ground:{self.ground_kind[x, z]}"

    def surface_grid(self):
        """All surface strings as a list of columns (outer index x)."""
        return [[self.surface_at(x, z) for z in range(self.length)]
                for x in range(self.width)]

    def vegetation_count(self) -> int:
        return int(((self.canopy > 0) & ~self.water & ~self.artificial).sum())

    def apply_edit(self, edit: Edit):
        """Apply one block change and append it to the edit log.

        "air" removes the column's top block; any other block either raises
        the column by one (y == altitude) or repaints the current top
        (y == altitude - 1). All generator mutations go through here so the
        log replays exactly.
        """
        x, y, z, block = edit
        self.check_bounds(x, z)
        a = int(self.altitude[x, z])
        if block == "air":
            if y != a - 1:
                raise ValueError(f"air edit at y={y} but column top is {a - 1}")
            self.altitude[x, z] = a - 1
            if self.canopy[x, z] > 0:
                self.canopy[x, z] -= 1
        else:
            if y == a:
                self.altitude[x, z] = a + 1
            elif y != a - 1:
                raise ValueError(f"block edit at y={y} but column top is {a - 1}")
            if _is_artificial_block(block):
                self.artificial[x, z] = True
            else:
                self.ground_kind[x, z] = block
                self.canopy[x, z] = 0
                self.water[x, z] = False
                self.artificial[x, z] = False
        self.edits.append(edit)

    def mark_artificial(self, x: int, z: int):
        self.check_bounds(x, z)
        self.artificial[x, z] = True

    def copy(self) -> "VoxelWorld":
        return VoxelWorld(self.altitude.copy(), self.water.copy(),
                          self.canopy.copy(), self.ground_kind.copy(),
                          self.artificial.copy(), list(self.edits))

    def replay_onto(self, original: "VoxelWorld") -> "VoxelWorld":
        """Apply this world's edit log onto a copy of ``original``."""
        out = original.copy()
        for edit in self.edits:
            out.apply_edit(edit)
        return out

    def __eq__(self, other):
        if not isinstance(other, VoxelWorld):
            return NotImplemented
        if self.altitude.shape != other.altitude.shape:
            return False
        return (np.array_equal(self.altitude, other.altitude)
                and self.surface_grid() == other.surface_grid()
                and np.array_equal(self.artificial, other.artificial)
                and self.edits == [Edit(*e) for e in other.edits])

    def __repr__(self):
        return (f"VoxelWorld({self.width}x{self.length}, "
                f"{len(self.edits)} edits)")


def _grid_or(grid, shape, fill, dtype):
    if grid is None:
        return np.full(shape, fill, dtype=dtype)
    return np.asarray(grid, dtype=dtype)


def flat_world(width: int, length: int | None = None, altitude: int = 5,
               ground: str = "grass") -> VoxelWorld:
    """Uniform dry world; handy as a fixture and for calibration baselines."""
    if length is None:
        length = width
    return VoxelWorld(np.full((width, length), altitude, dtype=np.int64),
                      ground_kind=np.full((width, length), ground, dtype="<U16"))


# ---------------------------------------------------------------------------
# terrain classification and costs

def _plain_mask(world: VoxelWorld) -> np.ndarray:
    """Cells whose existing 4-neighbors all share the cell's altitude."""
    a = world.altitude
    ok = np.ones(a.shape, dtype=bool)
    dx = a[1:, :] != a[:-1, :]
    ok[1:, :] &= ~dx
    ok[:-1, :] &= ~dx
    dz = a[:, 1:] != a[:, :-1]
    ok[:, 1:] &= ~dz
    ok[:, :-1] &= ~dz
    return ok


def _around_artificial_mask(art: np.ndarray) -> np.ndarray:
    """Chebyshev-distance-1 fringe of the artificial mask (mask excluded)."""
    near = art.copy()
    near[1:, :] |= art[:-1, :]
    near[:-1, :] |= art[1:, :]
    near[:, 1:] |= art[:, :-1]
    near[:, :-1] |= art[:, 1:]
    near[1:, 1:] |= art[:-1, :-1]
    near[:-1, :-1] |= art[1:, 1:]
    near[1:, :-1] |= art[:-1, 1:]
    near[:-1, 1:] |= art[1:, :-1]
    return near & ~art


def gradient_grid(world: VoxelWorld) -> np.ndarray:
    """Per-cell sum of |altitude difference| to existing 4-neighbors."""
    a = world.altitude
    g = np.zeros(a.shape, dtype=np.int64)
    dx = np.abs(a[1:, :] - a[:-1, :])
    g[1:, :] += dx
    g[:-1, :] += dx
    dz = np.abs(a[:, 1:] - a[:, :-1])
    g[:, 1:] += dz
    g[:, :-1] += dz
    return g


_CLASS_CODES = {
    TerrainClass.PLAIN: 0,
    TerrainClass.COMMON_LAND: 1,
    TerrainClass.WATER: 2,
    TerrainClass.ARTIFICIAL: 3,
    TerrainClass.AROUND_ARTIFICIAL: 4,
}
_CODE_CLASSES = {v: k for k, v in _CLASS_CODES.items()}


def terrain_class_grid(world: VoxelWorld) -> np.ndarray:
    """uint8 grid of terrain class codes, precedence applied.

    Precedence: artificial > around-artificial > water > plain > common land.
    """
    art = world.artificial
    around = _around_artificial_mask(art)
    water = world.water & ~art & ~around
    plain = _plain_mask(world) & ~art & ~around & ~world.water
    grid = np.full(art.shape, _CLASS_CODES[TerrainClass.COMMON_LAND], dtype=np.uint8)
    grid[plain] = _CLASS_CODES[TerrainClass.PLAIN]
    grid[water] = _CLASS_CODES[TerrainClass.WATER]
    grid[around] = _CLASS_CODES[TerrainClass.AROUND_ARTIFICIAL]
    grid[art] = _CLASS_CODES[TerrainClass.ARTIFICIAL]
    return grid


def classify_terrain(world: VoxelWorld, cell) -> TerrainClass:
    """Terrain class of one cell. Raises IndexError out of bounds."""
    x, z = cell
    world.check_bounds(x, z)
    if world.artificial[x, z]:
        return TerrainClass.ARTIFICIAL
    x0, x1 = max(0, x - 1), min(world.width, x + 2)
    z0, z1 = max(0, z - 1), min(world.length, z + 2)
    if world.artificial[x0:x1, z0:z1].any():
        return TerrainClass.AROUND_ARTIFICIAL
    if world.water[x, z]:
        return TerrainClass.WATER
    a = world.altitude
    h = a[x, z]
    for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1)):
        if world.in_bounds(nx, nz) and a[nx, nz] != h:
            return TerrainClass.COMMON_LAND
    return TerrainClass.PLAIN


def cost_grid(world: VoxelWorld, model=None) -> np.ndarray:
    """Per-cell placement cost grid.

    ``model`` may override the per-class costs (attributes ``water``,
    ``plain``, ``artificial``, ``around_artificial``); default costs are the
    module constants. Common land always costs its gradient.
    """
    water_c = model.water if model is not None else WATER_COST
    plain_c = model.plain if model is not None else PLAIN_COST
    art_c = model.artificial if model is not None else ARTIFICIAL_COST
    around_c = model.around_artificial if model is not None else AROUND_ARTIFICIAL_COST
    classes = terrain_class_grid(world)
    cost = gradient_grid(world)
    cost[classes == _CLASS_CODES[TerrainClass.PLAIN]] = plain_c
    cost[classes == _CLASS_CODES[TerrainClass.WATER]] = water_c
    cost[classes == _CLASS_CODES[TerrainClass.AROUND_ARTIFICIAL]] = around_c
    cost[classes == _CLASS_CODES[TerrainClass.ARTIFICIAL]] = art_c
    return cost


def cell_cost(world: VoxelWorld, cell, model=None) -> int:
    """Placement cost of a single cell (gradient for common land)."""
    x, z = cell
    cls = classify_terrain(world, cell)
    if cls is TerrainClass.COMMON_LAND:
        a = world.altitude
        h = int(a[x, z])
        total = 0
        for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1)):
            if world.in_bounds(nx, nz):
                total += abs(h - int(a[nx, nz]))
        return total
    if model is not None:
        per_class = {TerrainClass.WATER: model.water,
                     TerrainClass.PLAIN: model.plain,
                     TerrainClass.ARTIFICIAL: model.artificial,
                     TerrainClass.AROUND_ARTIFICIAL: model.around_artificial}
    else:
        per_class = {TerrainClass.WATER: WATER_COST,
                     TerrainClass.PLAIN: PLAIN_COST,
                     TerrainClass.ARTIFICIAL: ARTIFICIAL_COST,
                     TerrainClass.AROUND_ARTIFICIAL: AROUND_ARTIFICIAL_COST}
    return per_class[cls]


def plain_ratio(world: VoxelWorld) -> float:
    """Fraction of cells classified plain."""
    classes = terrain_class_grid(world)
    return float((classes == _CLASS_CODES[TerrainClass.PLAIN]).mean())


# ---------------------------------------------------------------------------
# synthetic terrain

def _upsample(coarse: np.ndarray, size: int) -> np.ndarray:
    """Bilinear upsample of a square (n+1)x(n+1) grid to size x size."""
    n = coarse.shape[0] - 1
    t = np.linspace(0.0, n, size)
    i = np.minimum(t.astype(np.int64), n - 1)
    f = t - i
    a = coarse[np.ix_(i, i)]
    b = coarse[np.ix_(i + 1, i)]
    c = coarse[np.ix_(i, i + 1)]
    d = coarse[np.ix_(i + 1, i + 1)]
    fx = f[:, None]
    fz = f[None, :]
    return a * (1 - fx) * (1 - fz) + b * fx * (1 - fz) + c * (1 - fx) * fz + d * fx * fz


def generate_terrain(seed: int, size: int, target_plain_ratio: float,
                     water_fraction: float, vegetation_fraction: float = 0.02,
                     max_passes: int = 100) -> VoxelWorld:
    """Deterministic synthetic world calibrated to a plain-cell ratio.

    Starts from layered noise (rugged, near-zero plain ratio), floods the
    lowest ``water_fraction`` of cells, sprinkles vegetation columns, then
    iterates local smoothing (flatten small patches) or roughening (jitter
    plain cells) passes until the plain ratio is within +-0.05 of the
    target or ``max_passes`` elapse. Never fails: an unreached target is
    logged with the achieved ratio.
    """
    if size < 16:
        raise ValueError("size must be >= 16")
    rng = np.random.default_rng(seed)
    w = l = size

    height = np.full((w, l), 24.0)
    for cells, amp in ((max(2, size // 12), 9.0), (max(3, size // 5), 4.0)):
        height += amp * _upsample(rng.uniform(-1.0, 1.0, size=(cells + 1, cells + 1)), size)
    height += rng.uniform(0.0, 1.6, size=(w, l))  # unit jitter kills accidental flats
    altitude = np.maximum(np.round(height).astype(np.int64), 2)

    water = np.zeros((w, l), dtype=bool)
    if water_fraction > 0:
        level = np.quantile(height, water_fraction)
        water = height < level
        altitude[water] = max(2, int(np.floor(level)))

    canopy = np.zeros((w, l), dtype=np.int64)
    n_veg = int(round(vegetation_fraction * w * l))
    if n_veg > 0:
        land = np.flatnonzero(~water.ravel())
        picks = rng.choice(land, size=min(n_veg, land.size), replace=False)
        canopy.ravel()[picks] = rng.integers(2, 6, size=picks.size)
        altitude.ravel()[picks] += canopy.ravel()[picks]

    ground = np.full((w, l), "grass", dtype="<U16")
    world = VoxelWorld(altitude, water=water, canopy=canopy, ground_kind=ground)

    fixed = water | (canopy > 0)  # smoothing leaves lakes and trees alone
    area = w * l
    for _ in range(max_passes):
        ratio = plain_ratio(world)
        if abs(ratio - target_plain_ratio) <= 0.03:
            break
        if ratio < target_plain_ratio:
            deficit = target_plain_ratio - ratio
            n_patches = min(200, max(1, int(deficit * area / 50.0 * 0.7)))
            for _ in range(n_patches):
                cx = int(rng.integers(0, w))
                cz = int(rng.integers(0, l))
                if fixed[cx, cz]:
                    continue
                r = int(rng.integers(3, 7))
                x0, x1 = max(0, cx - r), min(w, cx + r + 1)
                z0, z1 = max(0, cz - r), min(l, cz + r + 1)
                xs, zs = np.mgrid[x0:x1, z0:z1]
                disc = ((xs - cx) ** 2 + (zs - cz) ** 2 <= r * r) & ~fixed[x0:x1, z0:z1]
                patch = world.altitude[x0:x1, z0:z1]
                patch[disc] = world.altitude[cx, cz]
        else:
            excess = ratio - target_plain_ratio
            classes = terrain_class_grid(world)
            plain_cells = np.flatnonzero((classes == _CLASS_CODES[TerrainClass.PLAIN]).ravel()
                                         & ~fixed.ravel())
            if plain_cells.size == 0:
                break
            m = min(plain_cells.size, max(1, int(excess * area * 0.5)))
            picks = rng.choice(plain_cells, size=m, replace=False)
            bumps = rng.choice(np.array([-1, 1]), size=m)
            flat = world.altitude.ravel()
            flat[picks] = np.maximum(flat[picks] + bumps, 2)
    else:
        log.warning("terrain calibration hit pass limit: target %.3f, achieved %.3f",
                    target_plain_ratio, plain_ratio(world))
    return world


# ---------------------------------------------------------------------------
# world files

def save_world(world: VoxelWorld, path):
    """Write the world as a single versioned JSON document."""
    doc = {
        "version": WORLD_FORMAT_VERSION,
        "width": world.width,
        "length": world.length,
        "altitude": world.altitude.tolist(),
        "surface": world.surface_grid(),
        "artificial": world.artificial.astype(int).tolist(),
        "edits": [{"x": e.x, "y": e.y, "z": e.z, "block": e.block} for e in world.edits],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))


def load_world(path) -> VoxelWorld:
    """Parse a world file; raises WorldFormatError naming the bad field."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise WorldFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise WorldFormatError("document root must be an object")
    version = doc.get("version")
    if version != WORLD_FORMAT_VERSION:
        raise WorldFormatError(
            f"unsupported version {version!r} in field 'version' "
            f"(expected {WORLD_FORMAT_VERSION})")
    width = _require_int(doc, "width")
    length = _require_int(doc, "length")
    altitude = _require_grid(doc, "altitude", width, length)
    alt = np.array(altitude, dtype=np.int64)
    if (alt < 0).any():
        raise WorldFormatError("field 'altitude' has negative heights")
    surface = _require_grid(doc, "surface", width, length)
    water = np.zeros((width, length), dtype=bool)
    canopy = np.zeros((width, length), dtype=np.int64)
    ground = np.full((width, length), "grass", dtype="<U16")
    art_from_surface = np.zeros((width, length), dtype=bool)
    for x in range(width):
        for z in range(length):
            s = surface[x][z]
            if not isinstance(s, str):
                raise WorldFormatError(f"field 'surface'[{x}][{z}] is not a string")
            if s == "water":
                water[x, z] = True
            elif s == "artificial":
                art_from_surface[x, z] = True
            elif s == "vegetation":
                canopy[x, z] = _DEFAULT_CANOPY
            elif s.startswith("vegetation:"):
                try:
                    canopy[x, z] = max(1, int(s.split(":", 1)[1]))
                except ValueError:
                    raise WorldFormatError(f"field 'surface'[{x}][{z}]: bad vegetation offset {s!r}")
            elif s.startswith("ground:"):
                ground[x, z] = s.split(":", 1)[1]
            else:
                raise WorldFormatError(f"field 'surface'[{x}][{z}]: unknown class {s!r}")
    artificial_raw = _require_grid(doc, "artificial", width, length)
    artificial = np.array(artificial_raw) != 0
    if not np.array_equal(artificial, art_from_surface):
        raise WorldFormatError("field 'artificial' disagrees with 'surface' classes")
    edits_raw = doc.get("edits")
    if not isinstance(edits_raw, list):
        raise WorldFormatError("field 'edits' must be a list")
    edits = []
    for i, entry in enumerate(edits_raw):
        try:
            edits.append(Edit(int(entry["x"]), int(entry["y"]), int(entry["z"]),
                              str(entry["block"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise WorldFormatError(f"field 'edits'[{i}] is malformed: {exc}") from exc
    return VoxelWorld(alt, water=water, canopy=canopy, ground_kind=ground,
                      artificial=artificial, edits=edits)


def _require_int(doc: dict, field: str) -> int:
    value = doc.get(field)
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise WorldFormatError(f"field {field!r} must be a positive integer")
    return value


def _require_grid(doc: dict, field: str, width: int, length: int) -> list:
    grid = doc.get(field)
    if not isinstance(grid, list) or len(grid) != width:
        raise WorldFormatError(f"field {field!r} must be a list of {width} columns")
    for x, col in enumerate(grid):
        if not isinstance(col, list) or len(col) != length:
            raise WorldFormatError(f"field {field!r}[{x}] must be a list of {length} cells")
    return grid
