"""Building catalog, placement cost/reward model and legality rules."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import NamedTuple

from citygen.errors import ConfigError, IllegalPlacementError
from citygen.world import VoxelWorld, cell_cost


class Rect(NamedTuple):
    """Half-open cell rectangle [x0, x1) x [z0, z1)."""

    x0: int
    z0: int
    x1: int
    z1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def length(self) -> int:
        return self.z1 - self.z0

    def contains(self, other: "Rect") -> bool:
        return (self.x0 <= other.x0 and self.z0 <= other.z0
                and other.x1 <= self.x1 and other.z1 <= self.z1)

    def center(self) -> tuple[float, float]:
        return ((self.x0 + self.x1 - 1) / 2.0, (self.z0 + self.z1 - 1) / 2.0)


def rect_gap(a: Rect, b: Rect) -> int:
    """Empty cells between two rectangles under the Chebyshev metric.

    Touching (edge or corner) rectangles and overlapping ones both have
    gap 0; one free cell between them is gap 1.
    """
    gx = max(0, b.x0 - a.x1, a.x0 - b.x1)
    gz = max(0, b.z0 - a.z1, a.z0 - b.z1)
    return max(gx, gz)


@dataclass(frozen=True)
class BuildingSpec:
    id: str
    name: str
    footprint: tuple[int, int]  # (fw, fl) cells
    reward: int
    is_monument: bool = False
    is_munition_factory: bool = False

    def __post_init__(self):
        fw, fl = self.footprint
        if fw < 1 or fl < 1:
            raise ConfigError(f"building {self.id!r}: footprint must be >= 1x1")
        if self.reward < 0:
            raise ConfigError(f"building {self.id!r}: reward must be >= 0")


@dataclass(frozen=True)
class Placement:
    """One placed building: catalog id plus minimum-corner anchor."""

    building_id: str
    x: int
    z: int
    footprint: tuple[int, int]

    @property
    def rect(self) -> Rect:
        return Rect(self.x, self.z, self.x + self.footprint[0], self.z + self.footprint[1])


class Catalog:
    """Immutable id-keyed collection of building specs."""

    def __init__(self, specs):
        specs = list(specs)
        ids = [s.id for s in specs]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate building ids in catalog")
        if sum(1 for s in specs if s.is_monument) > 1:
            raise ConfigError("catalog allows at most one monument")
        self._by_id = {s.id: s for s in specs}

    def get(self, building_id: str) -> BuildingSpec:
        try:
            return self._by_id[building_id]
        except KeyError:
            raise ConfigError(f"unknown building id {building_id!r}") from None

    def __iter__(self):
        return iter(self._by_id.values())

    def __len__(self):
        return len(self._by_id)

    def __contains__(self, building_id):
        return building_id in self._by_id

    def ids(self):
        return list(self._by_id)

    def to_json(self) -> list[dict]:
        out = []
        for s in self:
            roles = []
            if s.is_monument:
                roles.append("monument")
            if s.is_munition_factory:
                roles.append("munition_factory")
            out.append({"id": s.id, "name": s.name, "footprint": list(s.footprint),
                        "reward": s.reward, "roles": roles})
        return out

    @classmethod
    def from_json(cls, data) -> "Catalog":
        specs = []
        for entry in data:
            try:
                roles = entry.get("roles", [])
                specs.append(BuildingSpec(
                    id=entry["id"], name=entry.get("name", entry["id"]),
                    footprint=tuple(entry["footprint"]), reward=int(entry["reward"]),
                    is_monument="monument" in roles,
                    is_munition_factory="munition_factory" in roles))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad catalog entry {entry!r}: {exc}") from exc
        return cls(specs)


@dataclass(frozen=True)
class CostModel:
    """Terrain costs, monument bonus ceiling and pairwise spacing rule."""

    water: int = 10
    plain: int = 0
    artificial: int = 10000
    around_artificial: int = 50
    monument_bonus_max: int = 100
    min_distance: int = 3

    def __post_init__(self):
        for name in ("water", "plain", "artificial", "around_artificial",
                     "monument_bonus_max", "min_distance"):
            if getattr(self, name) < 0:
                raise ConfigError(f"cost model field {name!r} must be >= 0")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "CostModel":
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"bad cost model: {exc}") from exc


# Rewards per building. Footprints default to the reward's near-square
# factorization (footprint area == reward), overridable via catalog JSON.
_DEFAULT_BUILDINGS = [
    ("dorm", "Dorm", (17, 29), 493, {}),
    ("church", "Church", (16, 26), 416, {}),
    ("munition_factory", "Munition Factory", (7, 17), 119, {"is_munition_factory": True}),
    ("monument", "Monument", (25, 25), 625, {"is_monument": True}),
    ("shop", "Shop", (13, 14), 182, {}),
    ("him_statue", "HIM Statue", (5, 7), 35, {}),
    ("enderman_statue", "Enderman Statue", (5, 5), 25, {}),
    ("trampoline", "Trampoline", (5, 7), 35, {}),
    ("enchanting_room", "Enchanting Room", (11, 11), 121, {}),
]


def default_catalog() -> Catalog:
    return Catalog(BuildingSpec(id=i, name=n, footprint=f, reward=r, **flags)
                   for i, n, f, r, flags in _DEFAULT_BUILDINGS)


def world_rect(world: VoxelWorld) -> Rect:
    return Rect(0, 0, world.width, world.length)


def footprint_rect(spec: BuildingSpec, anchor) -> Rect:
    x, z = anchor
    return Rect(x, z, x + spec.footprint[0], z + spec.footprint[1])


def building_cost(world: VoxelWorld, spec: BuildingSpec, anchor, model: CostModel | None = None) -> int:
    """Sum of per-cell terrain costs over the footprint."""
    rect = footprint_rect(spec, anchor)
    if not world_rect(world).contains(rect):
        raise IllegalPlacementError(
            f"{spec.id} at {anchor} leaves the {world.width}x{world.length} world")
    total = 0
    for x in range(rect.x0, rect.x1):
        for z in range(rect.z0, rect.z1):
            total += cell_cost(world, (x, z), model)
    return total


def monument_bonus(world: VoxelWorld, anchor, spec: BuildingSpec,
                   model: CostModel, inner: Rect | None = None) -> int:
    """Center-proximity bonus, linear from the bonus cap down to 0.

    Distance is Euclidean from the footprint center to the inner-city
    center, normalized by the center-to-farthest-corner distance.
    Non-monument buildings earn 0.
    """
    if not spec.is_monument:
        return 0
    if inner is None:
        inner = world_rect(world)
    cx, cz = inner.center()
    fx, fz = footprint_rect(spec, anchor).center()
    d = math.hypot(fx - cx, fz - cz)
    d_max = math.hypot(cx - inner.x0, cz - inner.z0)
    if d_max <= 0:
        return model.monument_bonus_max
    return int(math.floor(model.monument_bonus_max * max(0.0, 1.0 - d / d_max)))


def placement_score(world: VoxelWorld, spec: BuildingSpec, anchor,
                    model: CostModel, inner: Rect | None = None) -> int:
    """Reward plus monument bonus minus terrain cost; may be negative."""
    return (spec.reward + monument_bonus(world, anchor, spec, model, inner)
            - building_cost(world, spec, anchor, model))


def legal(world: VoxelWorld, placements, spec: BuildingSpec, anchor,
          model: CostModel, inner: Rect | None = None) -> bool:
    """True iff the footprint fits the inner rectangle and keeps the
    minimum gap to every existing placement."""
    if inner is None:
        inner = world_rect(world)
    rect = footprint_rect(spec, anchor)
    if not inner.contains(rect) or not world_rect(world).contains(rect):
        return False
    return all(rect_gap(rect, p.rect) >= model.min_distance for p in placements)
