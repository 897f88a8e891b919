"""Desk-scale studies: nonrelativistic limits, the two-branch structure for
subcubic exponents, nonexistence evidence, and decay diagnostics.

Every study is deterministic (no random state) and emits plain dataclasses
the CLI and service serialize as CSV/JSON tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CollapseToZeroError, ParameterError, WindowUnderflowError
from .grid import RadialField, RadialGrid, laplacian_values, norms
from .params import Params, admissible
from .solvers import (
    Branch,
    BranchSpec,
    SolverConfig,
    SolveReport,
    continuation,
    minimize_nsp_global,
    minimize_nsp_ground,
    solve_nls_ground,
    _nls_descent,
)


def h2_proxy_gap(a: RadialField, b: RadialField) -> float:
    """Equivalent H^2 norm of a - b: L2 of the difference plus L2 of its
    Laplacian (second differences are avoided through the stencil form)."""
    grid = a.grid
    d = a.values - b.values
    lap = laplacian_values(grid, d)
    return float(
        np.sqrt(grid.integrate(d * d)) + np.sqrt(grid.integrate(lap * lap))
    )


def h1_gap(a: RadialField, b: RadialField) -> float:
    return norms(RadialField(a.grid, a.values - b.values))["H1"]


# -- nonrelativistic limit -----------------------------------------------------


@dataclass(frozen=True)
class LimitRow:
    c: float
    energy: float
    energy_gap: float
    h1_gap: float
    h2_gap: float


@dataclass(frozen=True)
class LimitStudyResult:
    rows: tuple[LimitRow, ...]
    fitted_order: float
    e_infinity: float
    reference: SolveReport
    branch: Branch

    @property
    def truncated(self) -> bool:
        return self.branch.truncated


def nonrelativistic_limit_study(
    grid: RadialGrid,
    params_base: Params,
    c_list: tuple[float, ...] | list[float],
    config: SolverConfig | None = None,
) -> LimitStudyResult:
    """Energy and profile convergence of the screened model toward the
    Poisson model as c grows.

    Computes the Poisson-model ground state once, sweeps the c branch by
    warm-started Newton (descending in 1/c^2), and tabulates energy gaps,
    H^1 distances and the H^2 proxy; the convergence order is the fitted
    slope of log(energy gap) against log(1/c^2).
    """
    config = config or SolverConfig()
    if not (3.0 < params_base.p < 6.0):
        raise ParameterError(f"limit study needs 3 < p < 6, got p = {params_base.p}")
    c_sorted = sorted(float(c) for c in c_list)
    if any(c <= 0 or math.isinf(c) for c in c_sorted):
        raise ParameterError("c_list must contain finite positive values")

    base_inf = params_base.with_(c=math.inf)
    reference = minimize_nsp_ground(grid, base_inf, config)
    e_inf = reference.energy.action

    targets = tuple(sorted(c_sorted, reverse=True))
    branch = continuation(grid, BranchSpec("c", targets), base_inf, reference, config)

    rows = []
    for pt in branch.points[1:]:
        rep = pt.report
        rows.append(
            LimitRow(
                c=pt.value,
                energy=rep.energy.action,
                energy_gap=abs(rep.energy.action - e_inf),
                h1_gap=h1_gap(rep.u, reference.u),
                h2_gap=h2_proxy_gap(rep.u, reference.u),
            )
        )
    rows.sort(key=lambda r: r.c)

    if len(rows) >= 2:
        x = np.log([1.0 / r.c**2 for r in rows])
        y = np.log([max(r.energy_gap, 1e-300) for r in rows])
        fitted = float(np.polyfit(x, y, 1)[0])
    else:
        fitted = math.nan
    return LimitStudyResult(
        rows=tuple(rows),
        fitted_order=fitted,
        e_infinity=e_inf,
        reference=reference,
        branch=branch,
    )


# -- two-branch structure for 2 < p < 3 -----------------------------------------


@dataclass(frozen=True)
class BranchTable:
    """c-convergence table of one solution family at fixed charge."""

    q: float
    limit_h1: float
    limit_energy: float
    rows: tuple[tuple[float, float, float], ...]  # (c, h1 gap to limit, energy)
    truncated: bool


@dataclass(frozen=True)
class TwoBranchCell:
    q: float
    perturbative: BranchTable | None
    global_min: BranchTable | None
    distinctness: tuple[tuple[float, float, float], ...]  # (c, |u-v|_H1, 0.1*max norm)
    collapse: str | None = None


@dataclass(frozen=True)
class TwoBranchResult:
    cells: tuple[TwoBranchCell, ...]
    global_min_h1_by_q: tuple[tuple[float, float], ...]  # (q, H1 of v at c = inf)
    notes: tuple[str, ...] = ()


def _c_table(
    grid: RadialGrid,
    params_q: Params,
    seed: SolveReport,
    c_list: tuple[float, ...],
    config: SolverConfig,
) -> tuple[BranchTable, dict[float, SolveReport]]:
    targets = tuple(sorted(c_list, reverse=True))
    br = continuation(grid, BranchSpec("c", targets), params_q, seed, config)
    rows = []
    by_c: dict[float, SolveReport] = {}
    for pt in br.points[1:]:
        rows.append((pt.value, h1_gap(pt.report.u, seed.u), pt.report.energy.action))
        by_c[pt.value] = pt.report
    rows.sort(key=lambda r: r[0])
    return (
        BranchTable(
            q=params_q.q,
            limit_h1=norms(seed.u)["H1"],
            limit_energy=seed.energy.action,
            rows=tuple(rows),
            truncated=br.truncated,
        ),
        by_c,
    )


def two_branch_study(
    grid: RadialGrid,
    params_base: Params,
    q_list: tuple[float, ...] | list[float],
    c_list: tuple[float, ...] | list[float],
    config: SolverConfig | None = None,
    jobs: int = 1,
) -> TwoBranchResult:
    """Both solution families of the subcubic regime, per charge.

    For each q: the perturbative family is continued in the charge from the
    decoupled ground state, the global-minimizer family comes from
    unconstrained minimization; each is then swept in c.  A charge at which
    a construction fails is recorded as collapse (nonexistence evidence for
    large charges) rather than raised.  Per-charge cells are independent and
    may run on ``jobs`` threads; aggregation is by sorted charge, so the
    result does not depend on scheduling.
    """
    config = config or SolverConfig()
    if not (2.0 < params_base.p < 3.0):
        raise ParameterError(f"two-branch study needs 2 < p < 3, got p = {params_base.p}")
    qs = sorted({float(q) for q in q_list})
    cs = tuple(sorted(float(c) for c in c_list))
    notes: list[str] = []

    # one ascending q-continuation provides every perturbative limit profile
    base0 = params_base.with_(q=0.0, c=math.inf)
    w0 = solve_nls_ground(grid, base0, config)
    qbr = continuation(grid, BranchSpec("q", tuple(qs)), base0, w0, config)
    perturbative_at = {pt.value: pt.report for pt in qbr.points[1:]}
    if qbr.truncated:
        notes.append(
            f"perturbative family unreachable beyond q = {max(perturbative_at, default=0.0):g} "
            f"(continuation truncated toward q = {qbr.truncated_at:g})"
        )

    def cell_for(q: float) -> tuple[TwoBranchCell, float | None]:
        params_q = params_base.with_(q=q, c=math.inf)
        collapse_msgs = []

        pert_table = None
        pert_by_c: dict[float, SolveReport] = {}
        if q in perturbative_at:
            pert_table, pert_by_c = _c_table(grid, params_q, perturbative_at[q], cs, config)
        else:
            collapse_msgs.append("perturbative branch not reachable by charge continuation")

        glob_table = None
        glob_by_c: dict[float, SolveReport] = {}
        v_norm: float | None = None
        try:
            v_inf = minimize_nsp_global(grid, params_q, config)
            v_norm = norms(v_inf.u)["H1"]
            glob_table, glob_by_c = _c_table(grid, params_q, v_inf, cs, config)
        except CollapseToZeroError as exc:
            collapse_msgs.append(f"global minimization collapsed: {exc}")

        distinct = []
        for c in cs:
            if c in pert_by_c and c in glob_by_c:
                uu = pert_by_c[c].u
                vv = glob_by_c[c].u
                distinct.append(
                    (c, h1_gap(uu, vv), 0.1 * max(norms(uu)["H1"], norms(vv)["H1"]))
                )
        cell = TwoBranchCell(
            q=q,
            perturbative=pert_table,
            global_min=glob_table,
            distinctness=tuple(distinct),
            collapse="; ".join(collapse_msgs) if collapse_msgs else None,
        )
        return cell, v_norm

    if jobs > 1 and len(qs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(cell_for, qs))
    else:
        results = [cell_for(q) for q in qs]

    cells = [cell for cell, _ in results]
    v_h1 = [(q, v) for q, (_, v) in zip(qs, results) if v is not None]
    return TwoBranchResult(
        cells=tuple(cells),
        global_min_h1_by_q=tuple(v_h1),
        notes=tuple(notes),
    )


# -- nonexistence sweep ----------------------------------------------------------


@dataclass(frozen=True)
class FlowDiagnostic:
    """Outcome of a near-critical descent flow at one resolution.

    At exponents within a hair of the critical value 6, flows on a fixed
    grid settle on grid-scale states on either side of the threshold; the
    scientific signal is the refinement trend (amplitude and energy ratios
    across resolutions), recorded by the sweep rather than overclaimed as a
    binary collapse flag.
    """

    p: float
    n: int
    outcome: str  # 'converged' | 'collapsed' | 'no_convergence'
    iterations: int
    final_h1: float
    final_action: float
    amplitude: float


@dataclass(frozen=True)
class NonexistenceReport:
    validation: tuple[tuple[float, bool, str], ...]  # (p, accepted, message)
    diagnostics: tuple[FlowDiagnostic, ...]


def _diagnostic_flow(grid: RadialGrid, params: Params, config: SolverConfig) -> FlowDiagnostic:
    """Run the decoupled-model descent without admissibility gating and
    classify the outcome; used to contrast p just below and above the
    critical exponent 6."""
    from .functionals import preconditioner_for
    from .grid import h1_norm_values
    from .solvers import _gradient, _value_and_phi

    nls = params.with_(q=0.0, c=math.inf)
    try:
        vals, iters = _nls_descent(grid, nls, config)
    except CollapseToZeroError:
        return FlowDiagnostic(params.p, grid.n, "collapsed", 0, 0.0, 0.0, 0.0)
    h1 = h1_norm_values(grid, vals)
    action, _, _ = _value_and_phi(grid, vals, nls)
    gnorm = preconditioner_for(nls, grid).dual_norm(
        _gradient(grid, vals, nls, np.zeros(grid.n + 1))
    )
    if h1 < 1e-6:
        outcome = "collapsed"
    elif gnorm <= 10.0 * max(config.tol_grad, 1e-8) * max(1.0, h1):
        outcome = "converged"
    else:
        outcome = "no_convergence"
    return FlowDiagnostic(
        params.p, grid.n, outcome, iters, h1, action, float(np.max(np.abs(vals)))
    )


def nonexistence_sweep(
    params_base: Params,
    grid: RadialGrid | None = None,
    config: SolverConfig | None = None,
) -> NonexistenceReport:
    """Validation outcomes for exponents in the nonexistence range, plus
    diagnostic descent flows straddling the critical exponent 6."""
    config = config or SolverConfig()
    rows = []
    for p in (1.5, 2.0, params_base.p, 6.0, 7.0):
        adm = admissible(params_base.with_(p=p))
        rows.append((p, adm.ok, "; ".join(adm.failures) if adm.failures else "admissible"))

    diagnostics = []
    if grid is not None:
        from .grid import make_grid

        diag_cfg = SolverConfig(
            tol_grad=max(config.tol_grad, 1e-7),
            max_iter=min(config.max_iter, 1200),
            damping=config.damping,
            newton_tol=config.newton_tol,
        )
        fine = make_grid(2 * grid.n, grid.r_max)
        for p in (5.99, 6.01):
            for g in (grid, fine):
                diagnostics.append(_diagnostic_flow(g, params_base.with_(p=p), diag_cfg))
    return NonexistenceReport(validation=tuple(rows), diagnostics=tuple(diagnostics))


# -- exponential-decay diagnostics -------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    rate: float
    r_squared: float
    linearized_rate: float
    ratio: float
    window: tuple[float, float]


def decay_fit(report: SolveReport) -> DecayFit:
    """Least-squares slope of log u on the window [0.5, 0.8] r_max, compared
    with the linearized tail rate sqrt(2 m mu - mu^2/c^2)."""
    grid = report.u.grid
    r = grid.r
    lo, hi = 0.5 * grid.r_max, 0.8 * grid.r_max
    mask = (r >= lo) & (r <= hi)
    vals = report.u.values[mask]
    if vals.size < 8:
        raise WindowUnderflowError("decay window contains too few nodes")
    if np.any(vals < 1e-300):
        raise WindowUnderflowError(
            "field underflows inside the decay window; shrink the window or the domain"
        )
    x = r[mask]
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    lin = -math.sqrt(report.params.mass_coefficient)
    return DecayFit(
        rate=float(slope),
        r_squared=r2,
        linearized_rate=lin,
        ratio=float(slope) / lin,
        window=(lo, hi),
    )
