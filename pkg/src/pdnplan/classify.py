"""Normalized tile power and High/Medium/Low activity classification.

Each tile's power is normalized by the maximum tile power of the scenario;
tiles then fall into High (at or above the high threshold), Medium, or Low
bands. Zero-power tiles get a fourth Idle class that downstream grid
construction treats exactly like Low, so no die region is ever left without
wires.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DomainError
from .floorplan import TileGrid


class TileClass(IntEnum):
    """Activity class, ordered so that comparisons follow grid density."""

    IDLE = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def letter(self) -> str:
        return _LETTERS[self]


_LETTERS = {TileClass.HIGH: "H", TileClass.MEDIUM: "M",
            TileClass.LOW: "L", TileClass.IDLE: "I"}
_FROM_LETTER = {v: k for k, v in _LETTERS.items()}


@dataclass
class Thresholds:
    """Classification thresholds on normalized power, 0 < t_med < t_high < 1."""

    t_high: float = 0.5
    t_med: float = 0.25

    def __post_init__(self):
        if not (0.0 < self.t_med < self.t_high < 1.0):
            raise DomainError(
                f"thresholds must satisfy 0 < t_med < t_high < 1, got "
                f"t_med={self.t_med}, t_high={self.t_high}")


@dataclass
class ClassMap:
    """Per-tile activity classes plus the normalized powers behind them."""

    nx: int
    ny: int
    classes: np.ndarray  # TileClass values, row-major
    normalized: np.ndarray  # power / max tile power, in [0, 1]
    max_power_w: float

    def __post_init__(self):
        self.classes = np.asarray(self.classes, dtype=np.int64)
        self.normalized = np.asarray(self.normalized, dtype=float)

    def tile_class(self, i: int) -> TileClass:
        return TileClass(int(self.classes[i]))

    def letters(self) -> list[str]:
        """Row-major "H"/"M"/"L"/"I" labels (the report JSON representation)."""
        return [_LETTERS[TileClass(c)] for c in self.classes]

    def histogram(self) -> dict[str, int]:
        return {letter: int(np.count_nonzero(self.classes == cls))
                for cls, letter in _LETTERS.items()}

    @classmethod
    def from_letters(cls, nx: int, ny: int, letters: list[str],
                     normalized=None, max_power_w: float = 0.0) -> "ClassMap":
        codes = np.array([_FROM_LETTER[s] for s in letters], dtype=np.int64)
        p = np.zeros(len(letters)) if normalized is None else normalized
        return cls(nx=nx, ny=ny, classes=codes, normalized=p,
                   max_power_w=max_power_w)


def classify(tiles: TileGrid, thresholds: Thresholds | None = None) -> ClassMap:
    """Assign each tile an activity class from its normalized power.

    High covers ``t_high <= p <= 1`` (boundary inclusive), Medium
    ``t_med <= p < t_high``, Low ``0 < p < t_med``, and Idle exactly ``p = 0``.
    When every tile is powerless the whole map is Idle.
    """
    thresholds = thresholds or Thresholds()
    if tiles.num_tiles < 1:
        raise DomainError("cannot classify an empty tile grid")
    power = tiles.power_w
    if power.min() < 0:
        raise DomainError("tile powers must be >= 0")
    p_max = float(power.max())
    if p_max == 0.0:
        p = np.zeros_like(power)
    else:
        p = power / p_max
    classes = np.full(tiles.num_tiles, TileClass.LOW, dtype=np.int64)
    classes[p == 0.0] = TileClass.IDLE
    classes[p >= thresholds.t_med] = TileClass.MEDIUM
    classes[p >= thresholds.t_high] = TileClass.HIGH
    return ClassMap(nx=tiles.nx, ny=tiles.ny, classes=classes, normalized=p,
                    max_power_w=p_max)
