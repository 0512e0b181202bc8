"""Command-line interface.

Subcommands mirror the pipeline stages so each is independently scriptable:
``analyze`` (full run), ``classify`` (stop after the class map), ``solve``
(electrical analysis of an existing layout JSON), ``render`` (SVG), and
``compare`` (diff two reports). Exit codes: 0 compliant, 2 when the analyzed
adaptive grid violates IR/EM constraints, 1 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import report as rpt
from .errors import PdnError
from .gridgen import PdnLayout
from .render import render_layout, save_svg

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATIONS = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract reserves 2 for
    constraint violations, so remap usage errors to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tiles_arg(text: str) -> tuple[int, int]:
    try:
        nx, ny = text.lower().split("x")
        return int(nx), int(ny)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected NXxNY (e.g. 16x16), got '{text}'") from None


def _add_common_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--mode", choices=("average", "peak"),
                   help="override the power-mapping mode")
    p.add_argument("--tiles", type=_tiles_arg, metavar="NXxNY",
                   help="override the tile counts")
    p.add_argument("--k", type=int, help="override the sampling stride")
    p.add_argument("--pitch", type=float, dest="pitch_um",
                   help="override the skeleton pitch (um)")
    p.add_argument("--out", help="output directory")


def _load_config(args) -> rpt.RunConfig:
    overrides = {"mode": args.mode, "k": args.k, "pitch_um": args.pitch_um,
                 "out_dir": args.out}
    tiles = getattr(args, "tiles", None)
    if tiles:
        overrides["nx"], overrides["ny"] = tiles
    return rpt.load_config(args.config, **overrides)


def _cmd_analyze(args) -> int:
    cfg = _load_config(args)
    if args.netlist:
        cfg.write_netlists = True
    result = rpt.run(cfg)
    r = result.report
    print(f"mode: {r.mode}   tiles: {r.nx}x{r.ny}   k: {r.k}   "
          f"pitch: {r.pitch_um} um")
    print(f"classes: {r.class_histogram}")
    print(f"metal area: adaptive {r.adaptive.metal_area_um2:.1f} um^2, "
          f"uniform {r.uniform.metal_area_um2:.1f} um^2 "
          f"-> reduction {r.reduction_pct:.2f}%")
    print(f"worst IR drop: adaptive {r.adaptive.worst_ir_drop_v:.6f} V, "
          f"uniform {r.uniform.worst_ir_drop_v:.6f} V")
    print(f"violations (adaptive): IR {r.adaptive.ir_violation_count}, "
          f"EM {r.adaptive.em_violation_count}")
    if cfg.out_dir:
        print(f"outputs written to {cfg.out_dir}")
    return EXIT_OK if r.compliant else EXIT_VIOLATIONS


def _cmd_classify(args) -> int:
    cfg = _load_config(args)
    cm, tiles = rpt.classify_only(cfg)
    print(f"tiles: {cm.nx}x{cm.ny}   max tile power: {cm.max_power_w:.6g} W")
    print(f"classes: {cm.histogram()}")
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "classmap.json"
        path.write_text(json.dumps(rpt.classmap_to_dict(cm), indent=2,
                                   sort_keys=True) + "\n", encoding="utf-8")
        print(f"class map written to {path}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    cfg = _load_config(args)
    layout = PdnLayout.from_dict(
        json.loads(Path(args.layout).read_text(encoding="utf-8")))
    stats, result, graph = rpt.solve_only(cfg, layout)
    print(f"layout: {layout.mode}   nodes: {stats.node_count}   "
          f"branches: {stats.branch_count}")
    print(f"worst IR drop: {stats.worst_ir_drop_v:.6f} V "
          f"(limit {cfg.tech.dv_max_v} V)")
    print(f"violations: IR {stats.ir_violation_count}, "
          f"EM {stats.em_violation_count}")
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        payload = stats.to_dict()
        payload["ir_violations"] = [v.to_dict() for v in result.ir_violations]
        payload["em_violations"] = [v.to_dict() for v in result.em_violations]
        path = out / "solve_report.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"solve report written to {path}")
    return EXIT_OK if stats.compliant else EXIT_VIOLATIONS


def _cmd_render(args) -> int:
    layout = PdnLayout.from_dict(
        json.loads(Path(args.layout).read_text(encoding="utf-8")))
    cm = None
    if args.classmap:
        cm = rpt.classmap_from_dict(
            json.loads(Path(args.classmap).read_text(encoding="utf-8")))
    pads = None
    if args.config:
        cfg = rpt.load_config(args.config)
        _, _, graph = rpt.solve_only(cfg, layout)
        pads = [(float(graph.xs[p]), float(graph.ys[p])) for p in graph.pads]
    save_svg(render_layout(layout, cm, pads), args.out)
    print(f"svg written to {args.out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    reports = []
    for path in (args.report_a, args.report_b):
        reports.append(rpt.AnalysisReport.from_dict(
            json.loads(Path(path).read_text(encoding="utf-8"))))
    print(rpt.compare(reports[0], reports[1]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdnplan",
                     description="Workload-aware PDN planning toolkit")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("analyze", help="run the full pipeline")
    _add_common_overrides(p)
    p.add_argument("--netlist", action="store_true",
                   help="also export SPICE-like netlists")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("classify", help="stop after tile classification")
    _add_common_overrides(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("solve", help="electrical analysis of a layout JSON")
    _add_common_overrides(p)
    p.add_argument("--layout", required=True, help="layout JSON to analyze")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("render", help="render a layout to SVG")
    p.add_argument("--layout", required=True)
    p.add_argument("--classmap", help="classmap JSON for the heatmap")
    p.add_argument("--config", help="config JSON; enables pad markers")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("compare", help="diff two report JSON files")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.set_defaults(fn=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PdnError as exc:
        print(f"pdnplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pdnplan: i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
