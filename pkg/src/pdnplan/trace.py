"""Power-trace ingestion and temporal reduction.

A trace is a CSV table with header ``t,<comp1>,<comp2>,...``: one row per
sampling step, an integer time index in the first column, and instantaneous
power in watts for every architectural component in the remaining columns.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, TraceParseError, ValidationError


@dataclass
class TraceMeta:
    """Free-form provenance labels carried alongside a trace."""

    workload: str = ""
    cores: int | None = None
    temperature_c: float | None = None


@dataclass
class PowerTrace:
    """Per-component time series of instantaneous power.

    ``samples`` is indexed ``[time_step, component]`` and holds watts; the
    component order matches the file column order. Instances are treated as
    immutable once constructed.
    """

    components: tuple[str, ...]
    timestep_s: float
    samples: np.ndarray
    meta: TraceMeta = field(default_factory=TraceMeta)

    def __post_init__(self):
        self.components = tuple(self.components)
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2:
            raise ValidationError("samples must be a 2-D (time x component) array")
        if self.samples.shape[1] != len(self.components):
            raise ValidationError(
                f"each row must have {len(self.components)} entries, "
                f"got {self.samples.shape[1]}")
        if len(set(self.components)) != len(self.components):
            raise ValidationError("component identifiers must be unique")
        if not (self.timestep_s > 0):
            raise ValidationError(f"timestep_s must be > 0, got {self.timestep_s}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise ValidationError("power samples must be finite")
        if self.samples.size and self.samples.min() < 0:
            t, k = np.argwhere(self.samples < 0)[0]
            raise ValidationError(
                f"negative power sample at step {t}, component "
                f"'{self.components[k]}'")

    @property
    def num_steps(self) -> int:
        return self.samples.shape[0]

    @property
    def num_components(self) -> int:
        return len(self.components)


@dataclass
class ComponentPower:
    """A single component's power, either time-averaged or a per-step value."""

    component: str
    power_w: float

    def __post_init__(self):
        if not (math.isfinite(self.power_w) and self.power_w >= 0):
            raise ValidationError(
                f"power for '{self.component}' must be finite and >= 0, "
                f"got {self.power_w}")


def load_trace(path: str | Path, timestep_s: float = 1.0,
               meta: TraceMeta | None = None) -> PowerTrace:
    """Parse a trace CSV file into a :class:`PowerTrace`.

    Column order in the file defines component index order. Time indices must
    be integers, strictly increasing, and uniformly spaced; non-uniform
    sampling is rejected rather than resampled.

    Args:
        path: trace CSV file (UTF-8, header ``t,<comp1>,...``).
        timestep_s: sampling period recorded as metadata.
        meta: optional provenance labels.

    Raises:
        TraceParseError: malformed header, ragged row, or unparseable cell.
        ValidationError: negative/non-finite sample or non-uniform time steps.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and not all(c.strip() == "" for c in r)]
    if not rows:
        raise TraceParseError(f"{path}: empty file")

    header = [c.strip() for c in rows[0]]
    if header[0] != "t":
        raise TraceParseError(
            f"{path}: first header column must be 't', got '{header[0]}'")
    components = header[1:]
    if not components:
        raise TraceParseError(f"{path}: header names no components")
    for i, name in enumerate(components):
        if not name:
            raise TraceParseError(f"{path}: empty component name in header column {i + 2}")
    seen: set[str] = set()
    for name in components:
        if name in seen:
            raise TraceParseError(f"{path}: duplicate header column '{name}'")
        seen.add(name)

    data_rows = rows[1:]
    if not data_rows:
        raise TraceParseError(f"{path}: no data rows")

    ncols = len(header)
    times = np.empty(len(data_rows), dtype=np.int64)
    samples = np.empty((len(data_rows), len(components)), dtype=float)
    for i, row in enumerate(data_rows):
        line = i + 2  # 1-based, after the header
        if len(row) != ncols:
            raise TraceParseError(
                f"{path}: line {line}: expected {ncols} fields, got {len(row)}")
        try:
            times[i] = int(row[0])
        except ValueError:
            raise TraceParseError(
                f"{path}: line {line}: time index '{row[0]}' is not an integer") from None
        for k, cell in enumerate(row[1:]):
            try:
                value = float(cell)
            except ValueError:
                raise TraceParseError(
                    f"{path}: line {line}: column '{components[k]}': "
                    f"'{cell}' is not a number") from None
            if not math.isfinite(value):
                raise ValidationError(
                    f"{path}: line {line}: column '{components[k]}': "
                    f"non-finite sample {cell}")
            if value < 0:
                raise ValidationError(
                    f"{path}: line {line}: column '{components[k]}': "
                    f"negative power {value}")
            samples[i, k] = value

    steps = np.diff(times)
    if len(steps) and (steps.min() <= 0 or steps.min() != steps.max()):
        raise ValidationError(
            f"{path}: time indices must be strictly increasing and uniformly "
            f"spaced, got steps {sorted(set(steps.tolist()))}")

    return PowerTrace(components=tuple(components), timestep_s=timestep_s,
                      samples=samples, meta=meta or TraceMeta())


def write_trace_csv(trace: PowerTrace, path: str | Path) -> Path:
    """Write a trace back out in the CSV interchange format."""
    path = Path(path)
    lines = ["t," + ",".join(trace.components)]
    for t in range(trace.num_steps):
        lines.append(str(t) + "," + ",".join(repr(float(v)) for v in trace.samples[t]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def average_power(trace: PowerTrace) -> list[ComponentPower]:
    """Reduce a trace to each component's arithmetic-mean power over time."""
    if trace.num_steps == 0:
        raise DomainError("cannot average a zero-length trace")
    means = trace.samples.sum(axis=0) / trace.num_steps
    return [ComponentPower(c, float(p)) for c, p in zip(trace.components, means)]


def per_step_power(trace: PowerTrace, t: int) -> list[ComponentPower]:
    """Return every component's instantaneous power at time step ``t``."""
    if not 0 <= t < trace.num_steps:
        raise IndexError(
            f"time step {t} out of range for trace with {trace.num_steps} steps")
    return [ComponentPower(c, float(p))
            for c, p in zip(trace.components, trace.samples[t])]
