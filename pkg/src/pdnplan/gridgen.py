"""Skeleton-grid definition and class-driven wire instantiation.

A uniform comb of candidate wire positions (the skeleton) is laid over the
die at a base pitch, offset half a pitch from the edges. Actual wires are
then instantiated per tile: High tiles keep every candidate line crossing
them, Medium tiles keep lines whose global index is a multiple of the
sampling stride ``k``, and Low/Idle tiles keep multiples of ``2k``. Because
the sparser selections are subsets of the denser ones, segments that survive
on a line join up across tile boundaries instead of dangling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify import ClassMap, TileClass
from .errors import ConstraintError, DomainError, ValidationError
from .floorplan import Floorplan, TileGrid

#: Tolerance for coordinates that should coincide exactly (abutting segments,
#: line spacing); micrometers.
GEOM_TOL = 1e-9


@dataclass
class WireWidths:
    """Wire width per orientation, micrometers."""

    h_um: float = 1.0
    v_um: float = 1.0

    def __post_init__(self):
        if not (self.h_um > 0 and self.v_um > 0):
            raise ValidationError(f"wire widths must be > 0, got {self}")

    def for_orientation(self, orientation: str) -> float:
        return self.h_um if orientation == "h" else self.v_um


@dataclass
class SkeletonGrid:
    """Candidate wire positions: vertical lines at ``x_lines``, horizontal at
    ``y_lines``, spaced by ``pitch_um``."""

    x_lines: np.ndarray
    y_lines: np.ndarray
    pitch_um: float

    def __post_init__(self):
        self.x_lines = np.asarray(self.x_lines, dtype=float)
        self.y_lines = np.asarray(self.y_lines, dtype=float)
        for name, lines in (("x_lines", self.x_lines), ("y_lines", self.y_lines)):
            if len(lines) == 0:
                raise ValidationError(f"{name} is empty")
            gaps = np.diff(lines)
            if len(gaps) and (gaps.min() <= 0 or
                              np.abs(gaps - self.pitch_um).max() > 1e-6):
                raise ValidationError(
                    f"{name} must be strictly increasing at pitch {self.pitch_um}")

    def lines(self, orientation: str) -> np.ndarray:
        return self.y_lines if orientation == "h" else self.x_lines


def build_skeleton(fp: Floorplan, pitch_um: float,
                   tiles: TileGrid | None = None) -> SkeletonGrid:
    """Lay the uniform candidate comb over the die.

    Lines sit at ``pitch/2 + i * pitch`` from each die edge (a centered comb).
    When ``tiles`` is given, the pitch must not exceed the tile dimensions,
    which guarantees at least one candidate line per tile per orientation.
    """
    if pitch_um <= 0:
        raise DomainError(f"pitch must be > 0, got {pitch_um}")
    if tiles is not None:
        min_dim = min(tiles.tile_w_um, tiles.tile_h_um)
        if pitch_um > min_dim + GEOM_TOL:
            raise ConstraintError(
                f"pitch {pitch_um} um exceeds the minimum tile dimension "
                f"{min_dim} um; every tile needs at least one candidate line "
                f"per orientation")
    ox, oy = fp.origin_um

    def comb(origin: float, extent: float) -> np.ndarray:
        count = int(np.floor((extent - pitch_um / 2) / pitch_um + 1e-9)) + 1
        if count < 1:
            raise ConstraintError(
                f"pitch {pitch_um} um leaves no candidate line across "
                f"{extent} um")
        return origin + pitch_um / 2 + pitch_um * np.arange(count)

    return SkeletonGrid(x_lines=comb(ox, fp.die_w_um),
                        y_lines=comb(oy, fp.die_h_um), pitch_um=pitch_um)


@dataclass(frozen=True)
class Segment:
    """One instantiated wire piece: a skeleton line clipped to one tile."""

    orientation: str  # "h" or "v"
    line_index: int
    tile_index: int
    x0: float
    y0: float
    x1: float
    y1: float
    width_um: float

    @property
    def length_um(self) -> float:
        return (self.x1 - self.x0) if self.orientation == "h" else (self.y1 - self.y0)

    @property
    def key(self) -> tuple:
        return (self.orientation, self.line_index, self.tile_index)


@dataclass
class PdnLayout:
    """Instantiated wires plus the geometry they were generated against."""

    mode: str  # "adaptive" or "uniform"
    k: int | None
    widths: WireWidths
    die_w_um: float
    die_h_um: float
    origin_um: tuple[float, float]
    nx: int
    ny: int
    segments: list[Segment] = field(default_factory=list)
    metal_area_um2: float = 0.0

    def segment_keys(self) -> set[tuple]:
        return {s.key for s in self.segments}

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "k": self.k,
            "widths": {"h_um": self.widths.h_um, "v_um": self.widths.v_um},
            "die": {"w_um": self.die_w_um, "h_um": self.die_h_um,
                    "origin_um": list(self.origin_um)},
            "tiles": {"nx": self.nx, "ny": self.ny},
            "metal_area_um2": self.metal_area_um2,
            "segments": [
                {"orientation": s.orientation, "line_index": s.line_index,
                 "tile_index": s.tile_index,
                 "endpoints": [s.x0, s.y0, s.x1, s.y1], "width_um": s.width_um}
                for s in self.segments],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PdnLayout":
        segments = [Segment(orientation=s["orientation"],
                            line_index=int(s["line_index"]),
                            tile_index=int(s["tile_index"]),
                            x0=s["endpoints"][0], y0=s["endpoints"][1],
                            x1=s["endpoints"][2], y1=s["endpoints"][3],
                            width_um=float(s["width_um"]))
                    for s in raw["segments"]]
        k = raw.get("k")
        return cls(mode=raw["mode"], k=None if k is None else int(k),
                   widths=WireWidths(**raw["widths"]),
                   die_w_um=float(raw["die"]["w_um"]),
                   die_h_um=float(raw["die"]["h_um"]),
                   origin_um=tuple(raw["die"].get("origin_um", (0.0, 0.0))),
                   nx=int(raw["tiles"]["nx"]), ny=int(raw["tiles"]["ny"]),
                   segments=segments,
                   metal_area_um2=float(raw["metal_area_um2"]))


def _class_stride(cls: TileClass, k: int) -> int:
    if cls == TileClass.HIGH:
        return 1
    if cls == TileClass.MEDIUM:
        return k
    return 2 * k  # LOW and IDLE both get the sparsest selection


def _tile_line_range(lines: np.ndarray, lo: float, hi: float) -> tuple[int, int]:
    """Global indices [a, b) of skeleton lines with lo <= position < hi."""
    a = int(np.searchsorted(lines, lo - GEOM_TOL, side="left"))
    b = int(np.searchsorted(lines, hi - GEOM_TOL, side="left"))
    return a, b


def _instantiate(sk: SkeletonGrid, tiles: TileGrid, widths: WireWidths,
                 stride_of_tile, mode: str, k: int | None) -> PdnLayout:
    segments: list[Segment] = []
    uncovered: list[tuple[int, int, str]] = []
    for i in range(tiles.num_tiles):
        rect = tiles.tile_rect(i)
        stride = stride_of_tile(i)
        for orientation, lines, lo, hi in (
                ("h", sk.y_lines, rect.y0, rect.y1),
                ("v", sk.x_lines, rect.x0, rect.x1)):
            a, b = _tile_line_range(lines, lo, hi)
            selected = [j for j in range(a, b) if j % stride == 0]
            if not selected:
                uncovered.append((i % tiles.nx, i // tiles.nx, orientation))
                continue
            width = widths.for_orientation(orientation)
            for j in selected:
                pos = float(lines[j])
                if orientation == "h":
                    seg = Segment("h", j, i, rect.x0, pos, rect.x1, pos, width)
                else:
                    seg = Segment("v", j, i, pos, rect.y0, pos, rect.y1, width)
                segments.append(seg)
    if uncovered:
        shown = ", ".join(f"({ix},{iy}):{o}" for ix, iy, o in uncovered[:8])
        more = "" if len(uncovered) <= 8 else f" (+{len(uncovered) - 8} more)"
        raise ConstraintError(
            f"{len(uncovered)} tile/orientation pairs keep no wire at this "
            f"pitch/k combination: {shown}{more}; decrease k or the pitch")
    segments.sort(key=lambda s: s.key)
    layout = PdnLayout(mode=mode, k=k, widths=widths,
                       die_w_um=tiles.nx * tiles.tile_w_um,
                       die_h_um=tiles.ny * tiles.tile_h_um,
                       origin_um=tiles.origin_um, nx=tiles.nx, ny=tiles.ny,
                       segments=segments)
    layout.metal_area_um2 = metal_area(layout)
    return layout


def instantiate_adaptive(sk: SkeletonGrid, cm: ClassMap, tiles: TileGrid,
                         k: int, widths: WireWidths | None = None) -> PdnLayout:
    """Instantiate wires per tile class: all lines in High tiles, every k-th
    in Medium, every 2k-th in Low/Idle (by global line index, so sparser
    selections nest inside denser ones)."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise DomainError(f"sampling stride k must be an integer >= 1, got {k}")
    if cm.nx != tiles.nx or cm.ny != tiles.ny:
        raise DomainError(
            f"class map is {cm.nx}x{cm.ny} but tiles are {tiles.nx}x{tiles.ny}")
    widths = widths or WireWidths()
    k = int(k)
    return _instantiate(sk, tiles, widths,
                        lambda i: _class_stride(cm.tile_class(i), k),
                        mode="adaptive", k=k)


def instantiate_uniform(sk: SkeletonGrid, tiles: TileGrid,
                        widths: WireWidths | None = None) -> PdnLayout:
    """Instantiate every skeleton line across the die (the baseline grid)."""
    widths = widths or WireWidths()
    return _instantiate(sk, tiles, widths, lambda i: 1, mode="uniform", k=None)


def merged_runs(layout: PdnLayout, orientation: str) -> dict[int, tuple[float, list[tuple[float, float]]]]:
    """Coalesce abutting per-tile segments into maximal contiguous runs.

    Returns ``{line_index: (line_position, [(start, end), ...])}`` with the
    runs sorted along the line. Used for both metal-area accounting (no double
    counting at shared tile boundaries) and node extraction.
    """
    per_line: dict[int, list[Segment]] = {}
    for s in layout.segments:
        if s.orientation == orientation:
            per_line.setdefault(s.line_index, []).append(s)
    out: dict[int, tuple[float, list[tuple[float, float]]]] = {}
    for idx, segs in per_line.items():
        if orientation == "h":
            pos = segs[0].y0
            spans = sorted((s.x0, s.x1) for s in segs)
        else:
            pos = segs[0].x0
            spans = sorted((s.y0, s.y1) for s in segs)
        runs: list[tuple[float, float]] = []
        cur0, cur1 = spans[0]
        for a, b in spans[1:]:
            if a <= cur1 + GEOM_TOL:
                cur1 = max(cur1, b)
            else:
                runs.append((cur0, cur1))
                cur0, cur1 = a, b
        runs.append((cur0, cur1))
        out[idx] = (pos, runs)
    return out


def metal_area(layout: PdnLayout) -> float:
    """Total wire area: coalesced run length times width, per orientation."""
    area = 0.0
    for orientation in ("h", "v"):
        width = layout.widths.for_orientation(orientation)
        for _, (_, runs) in sorted(merged_runs(layout, orientation).items()):
            area += width * sum(b - a for a, b in runs)
    return area
