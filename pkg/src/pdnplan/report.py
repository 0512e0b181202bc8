"""End-to-end orchestration: trace to tiles to classes to grids to verdicts.

``run`` executes the whole pipeline for one scenario and produces an
:class:`AnalysisReport` comparing the adaptive grid against the uniformly
provisioned baseline. The baseline is always driven by worst-case (per-tile
peak) power, regardless of the adaptive mode, because that is what a
conservatively sized grid has to withstand.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .classify import ClassMap, Thresholds, classify
from .electrical import (PdnGraph, SolveResult, TechParams, build_graph,
                         check_em, check_ir, export_netlist, solve)
from .errors import ComparisonError, ConfigError, PdnError, PipelineError
from .floorplan import (Floorplan, TileGrid, load_floorplan, map_power,
                        partition, tile_peak_power)
from .gridgen import (PdnLayout, build_skeleton, instantiate_adaptive,
                      instantiate_uniform)
from .render import render_layout, save_svg
from .trace import average_power, load_trace

MODES = ("average", "peak")


@dataclass
class RunConfig:
    """Everything one scenario run needs; validated before anything executes."""

    trace_path: str
    floorplan_path: str
    nx: int = 16
    ny: int = 16
    thresholds: Thresholds = field(default_factory=Thresholds)
    k: int = 2
    pitch_um: float = 10.0
    mode: str = "average"
    tech: TechParams = field(default_factory=TechParams)
    pads: list[tuple[float, float]] | None = None
    out_dir: str | None = None
    solver_tol: float = 1e-10
    write_netlists: bool = False

    def validate(self) -> None:
        problems = []
        if not Path(self.trace_path).is_file():
            problems.append(f"trace file not found: {self.trace_path}")
        if not Path(self.floorplan_path).is_file():
            problems.append(f"floorplan file not found: {self.floorplan_path}")
        if self.nx < 1 or self.ny < 1:
            problems.append(f"tile counts must be >= 1, got {self.nx}x{self.ny}")
        if self.k < 1:
            problems.append(f"k must be >= 1, got {self.k}")
        if self.pitch_um <= 0:
            problems.append(f"pitch_um must be > 0, got {self.pitch_um}")
        if self.mode not in MODES:
            problems.append(f"mode must be one of {MODES}, got '{self.mode}'")
        if self.solver_tol <= 0:
            problems.append(f"solver_tol must be > 0, got {self.solver_tol}")
        if self.pads is not None:
            if not self.pads:
                problems.append("pads, when given, must list at least one (x, y)")
            for p in self.pads or []:
                if len(p) != 2:
                    problems.append(f"pad entry {p!r} is not an (x, y) pair")
        if problems:
            raise ConfigError(problems)


def load_config(path: str | Path, **overrides) -> RunConfig:
    """Read a run-configuration JSON file; keyword overrides win over file
    values. Relative paths resolve against the config file's directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    base = path.parent

    def respath(p):
        p = Path(p)
        return str(p if p.is_absolute() else base / p)

    try:
        tiles = raw.get("tiles", {})
        th = raw.get("thresholds", {})
        cfg = RunConfig(
            trace_path=respath(raw["trace"]),
            floorplan_path=respath(raw["floorplan"]),
            nx=int(tiles.get("nx", 16)), ny=int(tiles.get("ny", 16)),
            thresholds=Thresholds(t_high=float(th.get("t_high", 0.5)),
                                  t_med=float(th.get("t_med", 0.25))),
            k=int(raw.get("k", 2)),
            pitch_um=float(raw.get("pitch_um", 10.0)),
            mode=raw.get("mode", "average"),
            tech=TechParams(**raw.get("tech", {})),
            pads=[tuple(p) for p in raw["pads"]] if raw.get("pads") else None,
            out_dir=respath(raw["out_dir"]) if raw.get("out_dir") else None,
            solver_tol=float(raw.get("solver_tol", 1e-10)),
        )
    except KeyError as exc:
        raise ConfigError([f"config {path}: missing required key {exc}"]) from exc
    except (TypeError, ValueError, PdnError) as exc:
        raise ConfigError([f"config {path}: {exc}"]) from exc
    for key, value in overrides.items():
        if value is not None:
            cfg = replace(cfg, **{key: value})
    cfg.validate()
    return cfg


@dataclass
class GridStats:
    """Electrical and area summary for one instantiated grid."""

    metal_area_um2: float
    node_count: int
    branch_count: int
    worst_ir_drop_v: float
    ir_violation_count: int
    em_violation_count: int
    solver_method: str
    solver_iters: int
    residual: float

    @property
    def compliant(self) -> bool:
        return self.ir_violation_count == 0 and self.em_violation_count == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["compliant"] = self.compliant
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GridStats":
        d = {k: v for k, v in d.items() if k != "compliant"}
        return cls(**d)


@dataclass
class AnalysisReport:
    """Machine-readable summary of one scenario run."""

    mode: str
    workload: str
    die_w_um: float
    die_h_um: float
    nx: int
    ny: int
    k: int
    pitch_um: float
    t_high: float
    t_med: float
    v_dd: float
    total_power_w: float
    max_tile_power_w: float
    total_current_a: float
    class_histogram: dict[str, int]
    classes: list[str]
    adaptive: GridStats
    uniform: GridStats
    reduction_pct: float
    compliant: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["adaptive"] = self.adaptive.to_dict()
        d["uniform"] = self.uniform.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        d = dict(d)
        d["adaptive"] = GridStats.from_dict(d["adaptive"])
        d["uniform"] = GridStats.from_dict(d["uniform"])
        return cls(**d)


@dataclass
class RunResult:
    """Full artifact set of one pipeline run."""

    report: AnalysisReport
    classmap: ClassMap
    layout_adaptive: PdnLayout
    layout_uniform: PdnLayout
    graph_adaptive: PdnGraph
    graph_uniform: PdnGraph
    solve_adaptive: SolveResult
    solve_uniform: SolveResult


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def _grid_stats(layout: PdnLayout, graph: PdnGraph, result: SolveResult) -> GridStats:
    return GridStats(metal_area_um2=layout.metal_area_um2,
                     node_count=graph.num_nodes,
                     branch_count=len(graph.branches),
                     worst_ir_drop_v=result.worst_ir_drop,
                     ir_violation_count=len(result.ir_violations),
                     em_violation_count=len(result.em_violations),
                     solver_method=result.method,
                     solver_iters=result.solver_iters,
                     residual=result.residual)


def run(cfg: RunConfig) -> RunResult:
    """Execute the full pipeline for one scenario.

    Loads inputs, maps power in the configured mode, classifies tiles,
    instantiates the adaptive and uniform grids, solves and checks both, and
    assembles the report. Output files are written (atomically, only on
    success) when ``cfg.out_dir`` is set.
    """
    cfg.validate()
    with _stage("load_trace"):
        trace = load_trace(cfg.trace_path)
    with _stage("load_floorplan"):
        fp = load_floorplan(cfg.floorplan_path)
    with _stage("partition"):
        tiles_geom = partition(fp, cfg.nx, cfg.ny)
    with _stage("tile_power"):
        tiles_peak = tile_peak_power(trace, fp, tiles_geom, v_dd=cfg.tech.v_dd)
        if cfg.mode == "average":
            tiles_mode = map_power(tiles_geom, fp, average_power(trace),
                                   v_dd=cfg.tech.v_dd)
        else:
            tiles_mode = tiles_peak
    with _stage("classify"):
        cm = classify(tiles_mode, cfg.thresholds)
    with _stage("skeleton"):
        sk = build_skeleton(fp, cfg.pitch_um, tiles=tiles_geom)
    with _stage("instantiate"):
        layout_adaptive = instantiate_adaptive(sk, cm, tiles_mode, cfg.k,
                                               cfg.tech.widths)
        layout_uniform = instantiate_uniform(sk, tiles_geom, cfg.tech.widths)
    with _stage("electrical_adaptive"):
        g_a = build_graph(layout_adaptive, tiles_mode, cfg.tech, pads=cfg.pads)
        r_a = solve(g_a, tol=cfg.solver_tol)
        r_a.ir_violations = check_ir(r_a, cfg.tech, g_a)
        r_a.em_violations = check_em(r_a, g_a, cfg.tech)
    with _stage("electrical_uniform"):
        g_u = build_graph(layout_uniform, tiles_peak, cfg.tech, pads=cfg.pads)
        r_u = solve(g_u, tol=cfg.solver_tol)
        r_u.ir_violations = check_ir(r_u, cfg.tech, g_u)
        r_u.em_violations = check_em(r_u, g_u, cfg.tech)

    with _stage("report"):
        area_a = layout_adaptive.metal_area_um2
        area_u = layout_uniform.metal_area_um2
        adaptive_stats = _grid_stats(layout_adaptive, g_a, r_a)
        report = AnalysisReport(
            mode=cfg.mode, workload=trace.meta.workload,
            die_w_um=fp.die_w_um, die_h_um=fp.die_h_um,
            nx=cfg.nx, ny=cfg.ny, k=cfg.k, pitch_um=cfg.pitch_um,
            t_high=cfg.thresholds.t_high, t_med=cfg.thresholds.t_med,
            v_dd=cfg.tech.v_dd,
            total_power_w=float(tiles_mode.power_w.sum()),
            max_tile_power_w=float(tiles_mode.power_w.max()),
            total_current_a=float(tiles_mode.current_a.sum()),
            class_histogram=cm.histogram(),
            classes=cm.letters(),
            adaptive=adaptive_stats,
            uniform=_grid_stats(layout_uniform, g_u, r_u),
            reduction_pct=100.0 * (area_u - area_a) / area_u,
            compliant=adaptive_stats.compliant)

    result = RunResult(report=report, classmap=cm,
                       layout_adaptive=layout_adaptive,
                       layout_uniform=layout_uniform,
                       graph_adaptive=g_a, graph_uniform=g_u,
                       solve_adaptive=r_a, solve_uniform=r_u)
    if cfg.out_dir:
        with _stage("write_outputs"):
            write_outputs(result, cfg.out_dir, netlists=cfg.write_netlists)
    return result


def classify_only(cfg: RunConfig) -> tuple[ClassMap, TileGrid]:
    """Run the pipeline up to classification (the `classify` subcommand)."""
    cfg.validate()
    with _stage("load_trace"):
        trace = load_trace(cfg.trace_path)
    with _stage("load_floorplan"):
        fp = load_floorplan(cfg.floorplan_path)
    with _stage("partition"):
        tiles_geom = partition(fp, cfg.nx, cfg.ny)
    with _stage("tile_power"):
        if cfg.mode == "average":
            tiles_mode = map_power(tiles_geom, fp, average_power(trace),
                                   v_dd=cfg.tech.v_dd)
        else:
            tiles_mode = tile_peak_power(trace, fp, tiles_geom,
                                         v_dd=cfg.tech.v_dd)
    with _stage("classify"):
        return classify(tiles_mode, cfg.thresholds), tiles_mode


def solve_only(cfg: RunConfig, layout: PdnLayout) -> tuple[GridStats, SolveResult, PdnGraph]:
    """Run the electrical stage against an already instantiated layout."""
    cfg.validate()
    _, tiles_mode = classify_only(cfg)
    with _stage("electrical"):
        graph = build_graph(layout, tiles_mode, cfg.tech, pads=cfg.pads)
        result = solve(graph, tol=cfg.solver_tol)
        result.ir_violations = check_ir(result, cfg.tech, graph)
        result.em_violations = check_em(result, graph, cfg.tech)
    return _grid_stats(layout, graph, result), result, graph


def _dump_json(data: dict, path: Path) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def classmap_to_dict(cm: ClassMap) -> dict:
    return {"nx": cm.nx, "ny": cm.ny, "max_power_w": cm.max_power_w,
            "normalized": [float(v) for v in cm.normalized],
            "classes": cm.letters()}


def classmap_from_dict(d: dict) -> ClassMap:
    return ClassMap.from_letters(int(d["nx"]), int(d["ny"]), d["classes"],
                                 normalized=d.get("normalized"),
                                 max_power_w=float(d.get("max_power_w", 0.0)))


def write_outputs(result: RunResult, out_dir: str | Path,
                  netlists: bool = False) -> dict[str, Path]:
    """Write the report, layouts, class map, and SVG renders."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.json",
        "layout_adaptive": out / "layout_adaptive.json",
        "layout_uniform": out / "layout_uniform.json",
        "classmap": out / "classmap.json",
        "svg_adaptive": out / "layout_adaptive.svg",
        "svg_uniform": out / "layout_uniform.svg",
    }
    _dump_json(result.report.to_dict(), paths["report"])
    _dump_json(result.layout_adaptive.to_dict(), paths["layout_adaptive"])
    _dump_json(result.layout_uniform.to_dict(), paths["layout_uniform"])
    _dump_json(classmap_to_dict(result.classmap), paths["classmap"])
    pads_a = [(float(result.graph_adaptive.xs[p]), float(result.graph_adaptive.ys[p]))
              for p in result.graph_adaptive.pads]
    pads_u = [(float(result.graph_uniform.xs[p]), float(result.graph_uniform.ys[p]))
              for p in result.graph_uniform.pads]
    save_svg(render_layout(result.layout_adaptive, result.classmap, pads_a),
             paths["svg_adaptive"])
    save_svg(render_layout(result.layout_uniform, result.classmap, pads_u),
             paths["svg_uniform"])
    if netlists:
        paths["netlist_adaptive"] = out / "netlist_adaptive.sp"
        paths["netlist_uniform"] = out / "netlist_uniform.sp"
        paths["netlist_adaptive"].write_text(
            export_netlist(result.graph_adaptive, "adaptive grid"),
            encoding="utf-8")
        paths["netlist_uniform"].write_text(
            export_netlist(result.graph_uniform, "uniform grid"),
            encoding="utf-8")
    return paths


_COMPARE_FIELDS = [
    ("reduction_pct", lambda r: r.reduction_pct),
    ("metal_area_adaptive_um2", lambda r: r.adaptive.metal_area_um2),
    ("metal_area_uniform_um2", lambda r: r.uniform.metal_area_um2),
    ("worst_ir_drop_adaptive_v", lambda r: r.adaptive.worst_ir_drop_v),
    ("worst_ir_drop_uniform_v", lambda r: r.uniform.worst_ir_drop_v),
    ("ir_violations_adaptive", lambda r: r.adaptive.ir_violation_count),
    ("em_violations_adaptive", lambda r: r.adaptive.em_violation_count),
    ("ir_violations_uniform", lambda r: r.uniform.ir_violation_count),
    ("em_violations_uniform", lambda r: r.uniform.em_violation_count),
]


def compare(a: AnalysisReport, b: AnalysisReport) -> str:
    """Side-by-side textual diff of two reports over the same geometry."""
    for field_name in ("die_w_um", "die_h_um", "nx", "ny", "pitch_um"):
        va, vb = getattr(a, field_name), getattr(b, field_name)
        if va != vb:
            raise ComparisonError(
                f"reports cover different geometry: {field_name} differs "
                f"({va} vs {vb})")
    header = (f"{'metric':<28}{'a (' + a.mode + ')':>18}"
              f"{'b (' + b.mode + ')':>18}{'delta (b-a)':>16}")
    lines = [header, "-" * len(header)]
    for name, get in _COMPARE_FIELDS:
        va, vb = get(a), get(b)
        lines.append(f"{name:<28}{va:>18.6g}{vb:>18.6g}{vb - va:>16.6g}")
    return "\n".join(lines)
