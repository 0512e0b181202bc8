"""Workload-aware early-stage power delivery network planning.

Pipeline: architectural power traces are reduced to per-component averages or
per-tile peaks, mapped onto the floorplan as spatial power density, tiles are
classified High/Medium/Low by normalized power, a skeleton comb of candidate
wires is instantiated adaptively (dense over hot tiles, sparse over cold
ones), and the resulting resistive network is solved to verify IR-drop and
electromigration limits against a uniformly provisioned baseline.
"""

from .classify import ClassMap, Thresholds, TileClass, classify
from .electrical import (Branch, EmViolation, IrViolation, PdnGraph,
                         SolveResult, TechParams, build_graph, check_em,
                         check_ir, export_netlist, pad_supply_currents, solve)
from .errors import (ComparisonError, ConfigError, ConstraintError,
                     DomainError, GraphError, MappingError, PdnError,
                     PipelineError, SolverError, TraceParseError,
                     ValidationError)
from .floorplan import (Floorplan, Placement, Rect, TileGrid, current_demand,
                        load_floorplan, map_power, overlap_fraction_row,
                        partition, save_floorplan, tile_peak_power)
from .gridgen import (PdnLayout, Segment, SkeletonGrid, WireWidths,
                      build_skeleton, instantiate_adaptive,
                      instantiate_uniform, merged_runs, metal_area)
from .render import render_layout, save_svg
from .report import (AnalysisReport, GridStats, RunConfig, RunResult,
                     classify_only, compare, load_config, run, solve_only,
                     write_outputs)
from .trace import (ComponentPower, PowerTrace, TraceMeta, average_power,
                    load_trace, per_step_power, write_trace_csv)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "Branch", "ClassMap", "ComparisonError",
    "ComponentPower", "ConfigError", "ConstraintError", "DomainError",
    "EmViolation", "Floorplan", "GraphError", "GridStats", "IrViolation",
    "MappingError", "PdnError", "PdnGraph", "PdnLayout", "PipelineError",
    "Placement", "PowerTrace", "Rect", "RunConfig", "RunResult", "Segment",
    "SkeletonGrid", "SolveResult", "SolverError", "TechParams", "Thresholds",
    "TileClass", "TileGrid", "TraceMeta", "TraceParseError",
    "ValidationError", "WireWidths", "average_power", "build_graph",
    "build_skeleton", "check_em", "check_ir", "classify", "classify_only",
    "compare", "current_demand", "export_netlist", "instantiate_adaptive",
    "instantiate_uniform", "load_config", "load_floorplan", "load_trace",
    "map_power", "merged_runs", "metal_area", "overlap_fraction_row",
    "pad_supply_currents", "partition", "per_step_power", "render_layout",
    "run", "save_floorplan", "save_svg", "solve", "solve_only",
    "tile_peak_power", "write_outputs", "write_trace_csv",
]
