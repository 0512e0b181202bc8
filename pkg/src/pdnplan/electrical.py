"""Resistive-network extraction, solve, and IR/EM verification.

An instantiated layout is reduced to a node/branch graph: a node at every
crossing of a horizontal and a vertical wire run, a resistive branch for each
wire span between adjacent crossings (sheet-resistance square counting,
``R = rho_sq * L / W``), ideal-voltage pads at selected boundary crossings,
and per-node sink currents that spread each tile's demand uniformly over the
crossings inside it.

Solving eliminates the pad nodes as Dirichlet boundaries, leaving a symmetric
positive-definite nodal conductance system. It is solved in voltage-drop
space (``G * drop = sink``), so pad voltages are exact and zero injections
yield exactly zero drop. Small systems go through a dense Cholesky
factorization; larger ones through Jacobi-preconditioned conjugate gradients
with iterative refinement if the returned residual misses the tolerance.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, GraphError, SolverError, ValidationError
from .floorplan import TileGrid
from .gridgen import GEOM_TOL, PdnLayout, WireWidths, merged_runs

#: Unknown-count threshold between the dense direct path and CG.
DIRECT_SOLVE_MAX_UNKNOWNS = 500


@dataclass
class TechParams:
    """Electrical technology parameters.

    The defaults are placeholders so that small studies run out of the box;
    they are not calibrated to any process and real analyses must override
    them.
    """

    v_dd: float = 1.0
    sheet_res_ohm_sq: float = 0.04
    wire_thickness_um: float = 0.5
    j_max_a_per_um2: float = 2.0
    dv_max_v: float = 0.05
    widths: WireWidths = field(default_factory=WireWidths)

    def __post_init__(self):
        if isinstance(self.widths, dict):
            self.widths = WireWidths(**self.widths)
        for name in ("v_dd", "sheet_res_ohm_sq", "wire_thickness_um",
                     "j_max_a_per_um2", "dv_max_v"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.dv_max_v < self.v_dd:
            raise ValidationError(
                f"dv_max_v ({self.dv_max_v}) must be below v_dd ({self.v_dd})")

    def to_dict(self) -> dict:
        return {"v_dd": self.v_dd, "sheet_res_ohm_sq": self.sheet_res_ohm_sq,
                "wire_thickness_um": self.wire_thickness_um,
                "j_max_a_per_um2": self.j_max_a_per_um2,
                "dv_max_v": self.dv_max_v,
                "widths": {"h_um": self.widths.h_um, "v_um": self.widths.v_um}}


@dataclass
class Branch:
    """Resistive branch between two node indices."""

    a: int
    b: int
    resistance_ohm: float
    width_um: float = 1.0
    length_um: float = 0.0

    def __post_init__(self):
        if not self.resistance_ohm > 0:
            raise ValidationError(
                f"branch ({self.a},{self.b}) resistance must be > 0, "
                f"got {self.resistance_ohm}")


@dataclass
class PdnGraph:
    """Node/branch resistive network with pads and per-node sink currents."""

    node_names: list[str]
    xs: np.ndarray
    ys: np.ndarray
    branches: list[Branch]
    pads: list[int]
    injections: np.ndarray
    v_dd: float = 1.0

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        self.injections = np.asarray(self.injections, dtype=float)
        n = len(self.node_names)
        if self.xs.shape != (n,) or self.ys.shape != (n,):
            raise ValidationError("coordinate arrays must match node count")
        if self.injections.shape != (n,):
            raise ValidationError("injections must have one entry per node")
        for br in self.branches:
            if not (0 <= br.a < n and 0 <= br.b < n) or br.a == br.b:
                raise ValidationError(f"branch ({br.a},{br.b}) references bad nodes")
        for p in self.pads:
            if not 0 <= p < n:
                raise ValidationError(f"pad index {p} out of range")

    @property
    def num_nodes(self) -> int:
        return len(self.node_names)


def _point_in_runs(runs: list[tuple[float, float]], starts: list[float],
                   value: float) -> bool:
    i = bisect.bisect_right(starts, value + GEOM_TOL) - 1
    return i >= 0 and value <= runs[i][1] + GEOM_TOL


def build_graph(layout: PdnLayout, tiles: TileGrid, tech: TechParams,
                pads: list[tuple[float, float]] | None = None) -> PdnGraph:
    """Extract the resistive graph of an instantiated layout.

    Args:
        layout: instantiated wires (adaptive or uniform).
        tiles: tile grid carrying the per-tile current demand to inject.
        tech: sheet resistance and supply voltage.
        pads: pad locations in um, each snapped to the nearest node; ``None``
            places one pad at the grid intersection nearest each die corner.

    Raises:
        GraphError: a tile has current demand but no interior node, or some
            wires form an island that no pad can reach.
    """
    if not layout.segments:
        raise GraphError("layout has no segments")
    vruns = merged_runs(layout, "v")  # line index -> (x, [(y0, y1), ...])
    hruns = merged_runs(layout, "h")

    node_names: list[str] = []
    node_xy: list[tuple[float, float]] = []
    node_of: dict[tuple[int, int], int] = {}
    v_nodes: dict[int, list[int]] = {vi: [] for vi in vruns}
    h_nodes: dict[int, list[int]] = {hi: [] for hi in hruns}
    h_items = sorted(hruns.items())
    h_starts = {hi: [a for a, _ in runs] for hi, (_, runs) in h_items}
    for vi, (x, runs_v) in sorted(vruns.items()):
        starts_v = [a for a, _ in runs_v]
        for hi, (y, runs_h) in h_items:
            if _point_in_runs(runs_v, starts_v, y) and \
                    _point_in_runs(runs_h, h_starts[hi], x):
                idx = len(node_names)
                node_of[(vi, hi)] = idx
                node_names.append(f"n_{vi}_{hi}")
                node_xy.append((x, y))
                v_nodes[vi].append(idx)
                h_nodes[hi].append(idx)

    if not node_names:
        raise GraphError("layout wires never cross; no electrical nodes exist")
    xs = np.array([p[0] for p in node_xy])
    ys = np.array([p[1] for p in node_xy])

    branches: list[Branch] = []

    def _chain(indices: list[int], coords: np.ndarray, runs: list[tuple[float, float]],
               width: float) -> None:
        by_pos = sorted(indices, key=lambda i: coords[i])
        ri = 0
        prev = None
        for node in by_pos:
            pos = coords[node]
            while ri < len(runs) and pos > runs[ri][1] + GEOM_TOL:
                ri += 1
                prev = None
            if prev is not None:
                length = pos - coords[prev]
                if length > GEOM_TOL:
                    branches.append(Branch(
                        a=prev, b=node,
                        resistance_ohm=tech.sheet_res_ohm_sq * length / width,
                        width_um=width, length_um=length))
            prev = node

    for vi, (x, runs_v) in sorted(vruns.items()):
        _chain(v_nodes[vi], ys, runs_v, tech.widths.v_um)
    for hi, (y, runs_h) in h_items:
        _chain(h_nodes[hi], xs, runs_h, tech.widths.h_um)

    # Spread each tile's demand uniformly over the crossings inside it.
    ox, oy = tiles.origin_um
    col = np.clip((xs - ox) // tiles.tile_w_um, 0, tiles.nx - 1).astype(int)
    row = np.clip((ys - oy) // tiles.tile_h_um, 0, tiles.ny - 1).astype(int)
    tile_of_node = row * tiles.nx + col
    counts = np.bincount(tile_of_node, minlength=tiles.num_tiles)
    demand = tiles.current_a
    unservable = np.flatnonzero((demand > 0) & (counts == 0))
    if unservable.size:
        shown = ", ".join(f"({i % tiles.nx},{i // tiles.nx})"
                          for i in unservable[:8])
        more = "" if unservable.size <= 8 else f" (+{unservable.size - 8} more)"
        raise GraphError(
            f"{unservable.size} tiles have current demand but no grid node "
            f"inside them: {shown}{more}")
    injections = np.zeros(len(node_names))
    per_node = np.where(counts > 0, demand / np.maximum(counts, 1), 0.0)
    injections += per_node[tile_of_node]

    total = injections.sum()
    expected = demand.sum()
    if expected > 0 and abs(total - expected) > 1e-9 * expected:
        raise GraphError(
            f"injection total {total} drifted from tile demand {expected}")

    # Pads: nearest node to each requested location (die corners by default).
    x0, y0 = layout.origin_um
    if pads is None:
        targets = [(x0, y0), (x0 + layout.die_w_um, y0),
                   (x0, y0 + layout.die_h_um),
                   (x0 + layout.die_w_um, y0 + layout.die_h_um)]
    else:
        targets = [tuple(p) for p in pads]
        if not targets:
            raise GraphError("pad list is empty")
    pad_ids: list[int] = []
    for tx, ty in targets:
        nearest = int(np.argmin((xs - tx) ** 2 + (ys - ty) ** 2))
        if nearest not in pad_ids:
            pad_ids.append(nearest)

    graph = PdnGraph(node_names=node_names, xs=xs, ys=ys, branches=branches,
                     pads=pad_ids, injections=injections, v_dd=tech.v_dd)
    _check_connected(graph)
    return graph


def _check_connected(g: PdnGraph) -> None:
    parent = list(range(g.num_nodes))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for br in g.branches:
        ra, rb = find(br.a), find(br.b)
        if ra != rb:
            parent[ra] = rb
    pad_roots = {find(p) for p in g.pads}
    stranded = [i for i in range(g.num_nodes) if find(i) not in pad_roots]
    if stranded:
        raise GraphError(
            f"{len(stranded)} nodes cannot reach any pad "
            f"(e.g. {g.node_names[stranded[0]]})")


@dataclass
class SolveResult:
    """Node voltages and branch currents of one solved scenario."""

    node_voltages: np.ndarray
    drops: np.ndarray
    branch_currents: np.ndarray
    worst_ir_drop: float
    v_dd: float
    method: str
    solver_iters: int
    residual: float
    ir_violations: list = field(default_factory=list)
    em_violations: list = field(default_factory=list)


def _assemble(g: PdnGraph) -> tuple[np.ndarray, sp.csr_matrix, np.ndarray]:
    """Reduced conductance matrix over non-pad nodes, in drop space."""
    n = g.num_nodes
    unknown_of = np.full(n, -1, dtype=np.int64)
    unknown_nodes = np.array([i for i in range(n) if i not in set(g.pads)],
                             dtype=np.int64)
    unknown_of[unknown_nodes] = np.arange(len(unknown_nodes))

    a = np.array([br.a for br in g.branches], dtype=np.int64)
    b = np.array([br.b for br in g.branches], dtype=np.int64)
    cond = np.array([1.0 / br.resistance_ohm for br in g.branches])
    ua, ub = unknown_of[a], unknown_of[b]

    nu = len(unknown_nodes)
    diag = np.zeros(nu)
    np.add.at(diag, ua[ua >= 0], cond[ua >= 0])
    np.add.at(diag, ub[ub >= 0], cond[ub >= 0])

    both = (ua >= 0) & (ub >= 0)
    rows = np.concatenate([ua[both], ub[both], np.arange(nu)])
    cols = np.concatenate([ub[both], ua[both], np.arange(nu)])
    data = np.concatenate([-cond[both], -cond[both], diag])
    G = sp.coo_matrix((data, (rows, cols)), shape=(nu, nu)).tocsr()
    return unknown_nodes, G, g.injections[unknown_nodes]


def _cg_with_refinement(G: sp.csr_matrix, b: np.ndarray, tol: float,
                        maxiter: int) -> tuple[np.ndarray, int, float]:
    b_norm = float(np.linalg.norm(b))
    precond = sp.diags(1.0 / G.diagonal())
    iters = 0

    def count(_xk):
        nonlocal iters
        iters += 1

    x = np.zeros_like(b)
    r = b.copy()
    for _ in range(4):
        r_norm = float(np.linalg.norm(r))
        if r_norm <= tol * b_norm:
            break
        pass_rtol = max(tol * b_norm / r_norm, 1e-15)
        dx, _info = spla.cg(G, r, rtol=pass_rtol, atol=0.0, maxiter=maxiter,
                            M=precond, callback=count)
        x = x + dx
        r = b - G @ x
    residual = float(np.linalg.norm(b - G @ x)) / b_norm
    if residual > tol:
        raise SolverError(
            f"conjugate gradients stalled at relative residual {residual:.3e} "
            f"(target {tol:.1e}) after {iters} iterations",
            residual=residual, iterations=iters)
    return x, iters, residual


def solve(g: PdnGraph, tol: float = 1e-10, max_iters: int | None = None,
          method: str = "auto") -> SolveResult:
    """Solve for node voltages with pads held at ``v_dd``.

    Args:
        g: graph to solve; must contain at least one pad and every node must
            reach a pad (checked structurally).
        tol: relative residual target for the reduced system.
        max_iters: CG iteration budget per pass (default ``10 * unknowns``).
        method: "auto" picks dense Cholesky below
            :data:`DIRECT_SOLVE_MAX_UNKNOWNS` unknowns and CG above; "direct"
            or "cg" force a path.

    Raises:
        GraphError: no pads or unreachable nodes.
        SolverError: the iterative solve missed the tolerance.
    """
    if not g.pads:
        raise GraphError("cannot solve a graph without pads")
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    if method not in ("auto", "direct", "cg"):
        raise DomainError(f"unknown method '{method}'")
    _check_connected(g)

    unknown_nodes, G, sinks = _assemble(g)
    nu = len(unknown_nodes)
    chosen = method
    if method == "auto":
        chosen = "direct" if nu <= DIRECT_SOLVE_MAX_UNKNOWNS else "cg"

    iters = 0
    if nu == 0 or not np.any(sinks):
        u = np.zeros(nu)
        residual = 0.0
        chosen = "trivial"
    elif chosen == "direct":
        factor = scipy.linalg.cho_factor(G.toarray(), check_finite=False)
        u = scipy.linalg.cho_solve(factor, sinks, check_finite=False)
        residual = float(np.linalg.norm(sinks - G @ u) / np.linalg.norm(sinks))
    else:
        budget = max_iters if max_iters is not None else max(10 * nu, 100)
        u, iters, residual = _cg_with_refinement(G, sinks, tol, budget)

    drops = np.zeros(g.num_nodes)
    drops[unknown_nodes] = u
    voltages = g.v_dd - drops
    voltages[g.pads] = g.v_dd  # exact Dirichlet values

    if g.branches:
        a = np.array([br.a for br in g.branches])
        b = np.array([br.b for br in g.branches])
        R = np.array([br.resistance_ohm for br in g.branches])
        currents = (voltages[a] - voltages[b]) / R
    else:
        currents = np.zeros(0)

    return SolveResult(node_voltages=voltages, drops=drops,
                       branch_currents=currents,
                       worst_ir_drop=float(drops.max()) if len(drops) else 0.0,
                       v_dd=g.v_dd, method=chosen, solver_iters=iters,
                       residual=residual)


def pad_supply_currents(result: SolveResult, g: PdnGraph) -> np.ndarray:
    """Current each pad sources into the network (local sinks included)."""
    supply = np.zeros(len(g.pads))
    pad_pos = {p: i for i, p in enumerate(g.pads)}
    for br, current in zip(g.branches, result.branch_currents):
        if br.a in pad_pos:
            supply[pad_pos[br.a]] += current
        if br.b in pad_pos:
            supply[pad_pos[br.b]] -= current
    for p, i in pad_pos.items():
        supply[i] += g.injections[p]
    return supply


@dataclass
class IrViolation:
    node: int
    name: str
    voltage_v: float
    drop_v: float
    limit_v: float

    def to_dict(self) -> dict:
        return {"node": self.name, "voltage_v": self.voltage_v,
                "drop_v": self.drop_v, "limit_v": self.limit_v}


@dataclass
class EmViolation:
    branch: int
    node_a: str
    node_b: str
    current_a: float
    density_a_per_um2: float
    limit_a_per_um2: float

    def to_dict(self) -> dict:
        return {"from": self.node_a, "to": self.node_b,
                "current_a": self.current_a,
                "density_a_per_um2": self.density_a_per_um2,
                "limit_a_per_um2": self.limit_a_per_um2}


def check_ir(result: SolveResult, tech: TechParams,
             g: PdnGraph | None = None) -> list[IrViolation]:
    """Nodes whose voltage drop exceeds the allowance (bound is non-strict:
    a drop exactly at the limit is compliant)."""
    names = g.node_names if g is not None else None
    out = []
    for i in np.flatnonzero(result.drops > tech.dv_max_v):
        i = int(i)
        out.append(IrViolation(
            node=i, name=names[i] if names else f"#{i}",
            voltage_v=float(result.node_voltages[i]),
            drop_v=float(result.drops[i]), limit_v=tech.dv_max_v))
    return out


def check_em(result: SolveResult, g: PdnGraph,
             tech: TechParams) -> list[EmViolation]:
    """Branches whose current density exceeds the electromigration limit.

    Density is the solved DC branch current magnitude over the wire cross
    section (width times metal thickness).
    """
    out = []
    for idx, (br, current) in enumerate(zip(g.branches, result.branch_currents)):
        density = abs(current) / (br.width_um * tech.wire_thickness_um)
        if density > tech.j_max_a_per_um2:
            out.append(EmViolation(
                branch=idx, node_a=g.node_names[br.a], node_b=g.node_names[br.b],
                current_a=float(current), density_a_per_um2=float(density),
                limit_a_per_um2=tech.j_max_a_per_um2))
    return out


def export_netlist(g: PdnGraph, title: str = "pdn resistive network") -> str:
    """SPICE-like netlist text for cross-validation with circuit simulators."""
    lines = [f"* {title}"]
    for i, p in enumerate(g.pads):
        lines.append(f"V{i} {g.node_names[p]} 0 {g.v_dd!r}")
    for i, br in enumerate(g.branches):
        lines.append(f"R{i} {g.node_names[br.a]} {g.node_names[br.b]} "
                     f"{br.resistance_ohm!r}")
    count = 0
    for node in np.flatnonzero(g.injections != 0.0):
        lines.append(f"I{count} {g.node_names[int(node)]} 0 "
                     f"{g.injections[int(node)]!r}")
        count += 1
    lines.append(".end")
    return "\n".join(lines) + "\n"
