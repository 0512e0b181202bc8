"""Deterministic synthetic scenarios used by the tests and demos.

Real architectural traces are workload- and simulator-specific, so the
repository ships generators instead: a four-core trace with per-unit power
columns, a "hotspot" scenario whose class fractions (25% High, 25% Medium,
50% Low) make the adaptive/uniform area ratio analytically 0.5 at k=2, and a
"bursty" scenario whose anti-phase bursts upgrade tile classes under peak
mapping. Every generator is seeded or constant, so fixture files are
byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .floorplan import Floorplan, Placement, Rect, save_floorplan
from .trace import PowerTrace, TraceMeta, write_trace_csv

CORE_UNITS = ("ialu", "fpu", "rob", "bp", "ic", "dc", "lsu")

# Per-unit power scale in watts; loosely ranked by typical activity.
_UNIT_SCALE = {"ialu": 1.2, "fpu": 0.9, "rob": 0.6, "bp": 0.3,
               "ic": 0.5, "dc": 0.7, "lsu": 0.8}

# Unit rectangles in core-local coordinates (core is 1000x1000 um).
_UNIT_RECTS = {
    "ialu": (50, 50, 450, 300),
    "fpu": (550, 50, 950, 300),
    "rob": (50, 350, 450, 600),
    "lsu": (550, 350, 950, 600),
    "bp": (50, 650, 450, 850),
    "ic": (550, 650, 950, 850),
    "dc": (50, 880, 950, 980),
}

# Hotspot scenario: per-tile watts for the three activity bands (normalized
# 1.0 / 0.3 / 0.1). The hot value is sized so both grids stay IR/EM-compliant
# at the default technology parameters with ~25% margin.
HOTSPOT_TILE_W = {"hot": 3.2e-4, "warm": 9.6e-5, "cool": 3.2e-5}

# Bursty scenario: steady block per-tile watts; bursts peak at 0.75x that
# (average 0.375x), landing Medium under average mapping and High under peak.
BURSTY_STEADY_TILE_W = 4e-4


def four_core_floorplan() -> Floorplan:
    """2000x2000 um die holding four 1000x1000 um cores of seven units each."""
    placements = []
    for core in range(4):
        cx = 1000.0 * (core % 2)
        cy = 1000.0 * (core // 2)
        for unit in CORE_UNITS:
            x0, y0, x1, y1 = _UNIT_RECTS[unit]
            placements.append(Placement(
                f"core{core}.{unit}", Rect(cx + x0, cy + y0, cx + x1, cy + y1)))
    return Floorplan(2000.0, 2000.0, placements)


def four_core_trace(steps: int = 40, seed: int = 7,
                    timestep_s: float = 1e-3) -> PowerTrace:
    """Randomized but seeded per-unit power columns for the four-core die."""
    rng = np.random.default_rng(seed)
    fp = four_core_floorplan()
    components = [p.component for p in fp.placements]
    samples = np.empty((steps, len(components)))
    for j, name in enumerate(components):
        unit = name.split(".")[1]
        base = _UNIT_SCALE[unit]
        # Each column wanders around its unit's scale with its own phase.
        phase = rng.uniform(0, 2 * np.pi)
        wave = 0.5 + 0.35 * np.sin(np.linspace(0, 4 * np.pi, steps) + phase)
        noise = rng.uniform(0.85, 1.15, size=steps)
        samples[:, j] = base * wave * noise
    meta = TraceMeta(workload="synthetic-mix", cores=4, temperature_c=40.0)
    return PowerTrace(tuple(components), timestep_s, samples, meta)


def write_four_core_fixture(dest_dir: str | Path) -> tuple[Path, Path]:
    """Write the four-core trace CSV and floorplan JSON; returns their paths."""
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    trace_path = write_trace_csv(four_core_trace(), dest / "trace.csv")
    fp_path = save_floorplan(four_core_floorplan(), dest / "floorplan.json")
    return trace_path, fp_path


def _write_config(dest: Path, mode: str, extra: dict | None = None) -> Path:
    cfg = {
        "trace": "trace.csv",
        "floorplan": "floorplan.json",
        "tiles": {"nx": 16, "ny": 16},
        "thresholds": {"t_high": 0.5, "t_med": 0.25},
        "k": 2,
        "pitch_um": 31.25,
        "mode": mode,
        "tech": {},
    }
    cfg.update(extra or {})
    path = dest / "run.json"
    path.write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def write_hotspot_fixture(dest_dir: str | Path, mode: str = "average") -> Path:
    """Write the hotspot scenario (trace, floorplan, config); returns the
    config path.

    One quadrant runs hot, one warm, the upper half cool: 64/64/128 tiles at
    normalized powers 1.0/0.3/0.1, i.e. exactly 25% High, 25% Medium and 50%
    Low at the default thresholds. The trace is constant in time, so average
    and peak mapping agree.
    """
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    fp = Floorplan(2000.0, 2000.0, [
        Placement("hot_block", Rect(0, 0, 1000, 1000)),
        Placement("warm_block", Rect(1000, 0, 2000, 1000)),
        Placement("cool_block", Rect(0, 1000, 2000, 2000)),
    ])
    totals = {"hot_block": 64 * HOTSPOT_TILE_W["hot"],
              "warm_block": 64 * HOTSPOT_TILE_W["warm"],
              "cool_block": 128 * HOTSPOT_TILE_W["cool"]}
    steps = 4
    samples = np.tile([totals["hot_block"], totals["warm_block"],
                       totals["cool_block"]], (steps, 1))
    trace = PowerTrace(("hot_block", "warm_block", "cool_block"), 1e-3, samples,
                       TraceMeta(workload="hotspot", cores=1, temperature_c=40.0))
    write_trace_csv(trace, dest / "trace.csv")
    save_floorplan(fp, dest / "floorplan.json")
    return _write_config(dest, mode)


def write_bursty_fixture(dest_dir: str | Path, mode: str = "average") -> Path:
    """Write the bursty scenario (trace, floorplan, config); returns the
    config path.

    A steady block anchors the per-tile maximum while two equal blocks burst
    in anti-phase. Per-tile peaks put the burst tiles at 0.75 normalized
    (High); averages put them at 0.375 (Medium), so the average-mode adaptive
    grid is sparser and saves more area.
    """
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    fp = Floorplan(2000.0, 2000.0, [
        Placement("steady", Rect(0, 0, 500, 500)),
        Placement("burst_a", Rect(500, 0, 1000, 500)),
        Placement("burst_b", Rect(0, 500, 500, 1000)),
    ])
    steady_total = 16 * BURSTY_STEADY_TILE_W
    burst_total = 0.75 * steady_total
    steps = 8
    samples = np.zeros((steps, 3))
    samples[:, 0] = steady_total
    samples[0::2, 1] = burst_total
    samples[1::2, 2] = burst_total
    trace = PowerTrace(("steady", "burst_a", "burst_b"), 1e-3, samples,
                       TraceMeta(workload="bursty", cores=1, temperature_c=40.0))
    write_trace_csv(trace, dest / "trace.csv")
    save_floorplan(fp, dest / "floorplan.json")
    return _write_config(dest, mode)
