"""Die geometry, component placement, and tile-level power aggregation.

Components occupy axis-aligned rectangles on the die. The die is partitioned
into an ``nx x ny`` grid of equal tiles; component power is spread over tiles
in proportion to the overlapped area fraction, which conserves total power
exactly. Tile power then yields power density (W/um^2) and current demand
(P/V_dd) per tile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DomainError, MappingError, ValidationError
from .trace import ComponentPower, PowerTrace


class Rect(NamedTuple):
    """Axis-aligned rectangle in micrometers, (x0, y0) lower-left."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def w(self) -> float:
        return self.x1 - self.x0

    @property
    def h(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass
class Placement:
    component: str
    rect: Rect

    def __post_init__(self):
        self.rect = Rect(*self.rect)


@dataclass
class Floorplan:
    """Die extent plus component placement rectangles.

    ``origin_um`` anchors the die's lower-left corner; the JSON interchange
    format carries only width/height, so it defaults to (0, 0).
    """

    die_w_um: float
    die_h_um: float
    placements: list[Placement] = field(default_factory=list)
    origin_um: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.die_w_um > 0 and self.die_h_um > 0):
            raise ValidationError("die dimensions must be positive")
        self.placements = [p if isinstance(p, Placement) else Placement(*p)
                           for p in self.placements]
        x0, y0 = self.origin_um
        seen: set[str] = set()
        for p in self.placements:
            r = p.rect
            if not (r.x0 < r.x1 and r.y0 < r.y1):
                raise ValidationError(
                    f"component '{p.component}': degenerate rect {tuple(r)}")
            if r.x0 < x0 or r.y0 < y0 or r.x1 > x0 + self.die_w_um or \
                    r.y1 > y0 + self.die_h_um:
                raise ValidationError(
                    f"component '{p.component}': rect {tuple(r)} lies outside "
                    f"the die")
            if p.component in seen:
                raise ValidationError(f"duplicate component '{p.component}'")
            seen.add(p.component)

    @property
    def bounds(self) -> Rect:
        x0, y0 = self.origin_um
        return Rect(x0, y0, x0 + self.die_w_um, y0 + self.die_h_um)

    def translate(self, dx: float, dy: float) -> "Floorplan":
        """Shift the die and every placement by the same offset."""
        x0, y0 = self.origin_um
        moved = [Placement(p.component,
                           Rect(p.rect.x0 + dx, p.rect.y0 + dy,
                                p.rect.x1 + dx, p.rect.y1 + dy))
                 for p in self.placements]
        return Floorplan(self.die_w_um, self.die_h_um, moved,
                         origin_um=(x0 + dx, y0 + dy))

    def to_dict(self) -> dict:
        return {
            "die": {"w_um": self.die_w_um, "h_um": self.die_h_um},
            "placements": [{"component": p.component, "rect": list(p.rect)}
                           for p in self.placements],
        }


def load_floorplan(path: str | Path) -> Floorplan:
    """Read the floorplan JSON interchange format."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        die = raw["die"]
        placements = [Placement(p["component"], Rect(*p["rect"]))
                      for p in raw.get("placements", [])]
        return Floorplan(float(die["w_um"]), float(die["h_um"]), placements)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed floorplan JSON: {exc}") from exc


def save_floorplan(fp: Floorplan, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(fp.to_dict(), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


@dataclass
class TileGrid:
    """The tile partition and its per-tile power, density, and current.

    Tiles are enumerated row-major from the die origin: tile ``i`` sits at
    column ``i % nx``, row ``i // nx``. All per-tile quantities are flat
    arrays in that order.
    """

    nx: int
    ny: int
    tile_w_um: float
    tile_h_um: float
    origin_um: tuple[float, float] = (0.0, 0.0)
    power_w: np.ndarray = None
    density_w_per_um2: np.ndarray = None
    current_a: np.ndarray = None
    v_dd: float = 1.0

    def __post_init__(self):
        n = self.nx * self.ny
        for name in ("power_w", "density_w_per_um2", "current_a"):
            arr = getattr(self, name)
            arr = np.zeros(n) if arr is None else np.asarray(arr, dtype=float)
            if arr.shape != (n,):
                raise ValidationError(f"{name} must have {n} entries")
            setattr(self, name, arr)

    @property
    def num_tiles(self) -> int:
        return self.nx * self.ny

    @property
    def area_um2(self) -> float:
        """Area of one tile (the partition is uniform)."""
        return self.tile_w_um * self.tile_h_um

    def index(self, ix: int, iy: int) -> int:
        return iy * self.nx + ix

    def tile_rect(self, i: int) -> Rect:
        ix, iy = i % self.nx, i // self.nx
        x0 = self.origin_um[0] + ix * self.tile_w_um
        y0 = self.origin_um[1] + iy * self.tile_h_um
        return Rect(x0, y0, x0 + self.tile_w_um, y0 + self.tile_h_um)

    def same_geometry(self, other: "TileGrid") -> bool:
        return (self.nx == other.nx and self.ny == other.ny
                and math.isclose(self.tile_w_um, other.tile_w_um)
                and math.isclose(self.tile_h_um, other.tile_h_um)
                and self.origin_um == other.origin_um)


def partition(fp: Floorplan, nx: int, ny: int) -> TileGrid:
    """Partition the die into ``nx x ny`` equal tiles; all powers zero.

    The tile dimensions must reproduce the die exactly (within 1e-6 um).
    """
    if not all(isinstance(n, (int, np.integer)) for n in (nx, ny)) or nx < 1 or ny < 1:
        raise DomainError(f"tile counts must be positive integers, got {nx}x{ny}")
    nx, ny = int(nx), int(ny)
    tile_w = fp.die_w_um / nx
    tile_h = fp.die_h_um / ny
    if abs(nx * tile_w - fp.die_w_um) > 1e-6 or abs(ny * tile_h - fp.die_h_um) > 1e-6:
        raise DomainError(
            f"die {fp.die_w_um}x{fp.die_h_um} um does not divide into "
            f"{nx}x{ny} tiles within 1e-6 um")
    return TileGrid(nx=nx, ny=ny, tile_w_um=tile_w, tile_h_um=tile_h,
                    origin_um=fp.origin_um)


def overlap_fraction_row(rect: Rect, tiles: TileGrid) -> np.ndarray:
    """Fraction of ``rect``'s area overlapping each tile (row-major, sums to 1
    when the rect lies fully inside the tiled region)."""
    ox, oy = tiles.origin_um
    x_edges = ox + np.arange(tiles.nx + 1) * tiles.tile_w_um
    y_edges = oy + np.arange(tiles.ny + 1) * tiles.tile_h_um
    wx = np.clip(np.minimum(rect.x1, x_edges[1:]) - np.maximum(rect.x0, x_edges[:-1]),
                 0.0, None)
    wy = np.clip(np.minimum(rect.y1, y_edges[1:]) - np.maximum(rect.y0, y_edges[:-1]),
                 0.0, None)
    return (np.outer(wy, wx) / rect.area).ravel()


def current_demand(power_w: float, v_dd: float) -> float:
    """Current drawn by a region consuming ``power_w`` at supply ``v_dd``."""
    if v_dd <= 0:
        raise DomainError(f"V_dd must be > 0, got {v_dd}")
    if power_w < 0:
        raise DomainError(f"power must be >= 0, got {power_w}")
    return power_w / v_dd


def _power_by_component(powers: list[ComponentPower], fp: Floorplan) -> dict[str, float]:
    placed = {p.component for p in fp.placements}
    missing = sorted({cp.component for cp in powers} - placed)
    if missing:
        raise MappingError(
            "power entries for unplaced components: " + ", ".join(missing))
    total: dict[str, float] = {}
    for cp in powers:
        total[cp.component] = total.get(cp.component, 0.0) + cp.power_w
    return total


def map_power(tiles: TileGrid, fp: Floorplan, powers: list[ComponentPower],
              v_dd: float = 1.0) -> TileGrid:
    """Spread component powers over the tiles they overlap.

    Each component contributes its power times the fractional area overlap
    with each tile, so the tile total conserves the component total exactly.
    Accumulation order is fixed (components in placement order) for
    reproducibility. Returns a new grid with density and current populated.
    """
    if v_dd <= 0:
        raise DomainError(f"V_dd must be > 0, got {v_dd}")
    by_comp = _power_by_component(powers, fp)
    tile_power = np.zeros(tiles.num_tiles)
    for pl in fp.placements:
        p = by_comp.get(pl.component)
        if p:
            tile_power += p * overlap_fraction_row(pl.rect, tiles)
    return replace(tiles, power_w=tile_power,
                   density_w_per_um2=tile_power / tiles.area_um2,
                   current_a=tile_power / v_dd, v_dd=v_dd)


def tile_peak_power(trace: PowerTrace, fp: Floorplan, tiles: TileGrid,
                    v_dd: float = 1.0) -> TileGrid:
    """Per-tile maximum of the spatially mapped power over all time steps.

    The maximum is taken after mapping, per time step, so two components that
    burst out of phase can each drive their own tile's peak even though the
    chip total never reaches the sum of the peaks.
    """
    if trace.num_steps == 0:
        raise DomainError("cannot take per-tile peaks of a zero-length trace")
    if v_dd <= 0:
        raise DomainError(f"V_dd must be > 0, got {v_dd}")
    _power_by_component([ComponentPower(c, 0.0) for c in trace.components], fp)
    col = {c: k for k, c in enumerate(trace.components)}
    per_step = np.zeros((trace.num_steps, tiles.num_tiles))
    for pl in fp.placements:
        k = col.get(pl.component)
        if k is None:
            continue
        row = overlap_fraction_row(pl.rect, tiles)
        per_step += trace.samples[:, k:k + 1] * row[np.newaxis, :]
    tile_power = per_step.max(axis=0)
    return replace(tiles, power_w=tile_power,
                   density_w_per_um2=tile_power / tiles.area_um2,
                   current_a=tile_power / v_dd, v_dd=v_dd)
