"""Solitary-wave solvers.

Four computational routes, sharing one discretization:

  * shooting on the radial ODE for the decoupled nonlinear-Schrodinger
    ground state (the seed every continuation starts from),
  * Sobolev-gradient descent, preconditioned by (-lap + mass)^-1, with a
    dilation projection onto the Nehari-Pohozaev constraint (ground states,
    3 < p < 6) or unconstrained (global minimizers, 2 < p < 3),
  * Newton-Krylov on the reduced nonlocal equation with the exact Jacobian
    (the screened-potential linearization is applied matrix-free through
    the same Green operator), used to polish descent output and to drive
    parameter continuation, and
  * warm-started continuation in 1/c^2 or in the charge q, which turns a
    single converged solution into a branch.

Descent and Newton both operate on the modified (positive-part) action, so
converged nontrivial critical points are positive; reported energies use
the plain action, which agrees on positive fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded
from scipy.optimize import brentq
from scipy.sparse.linalg import LinearOperator, lgmres

from .errors import (
    CollapseToZeroError,
    DivergenceError,
    JacobianSingularError,
    NonConvergenceError,
    ParameterError,
)
from .functionals import (
    EnergyReport,
    FunctionalScalars,
    _report_nmkg,
    _report_nsp,
    functional_scalars,
    gradient_values_nmkg,
    gradient_values_nsp,
    kinetic_energy,
    kinetic_gradient_values,
    path_derivative_closed,
    path_energy_closed,
    path_scalars,
    preconditioner_for,
    project_nehari_pohozaev,
    scaling_path_energy,
)
from .grid import RadialField, RadialGrid, h1_norm_values
from .params import Params, require_admissible
from .potentials import newtonian_potential_values, solve_potential

Array = NDArray[np.float64]

POSITIVITY_SLACK = 1e-10
COLLAPSE_H1 = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budgets and stopping thresholds shared by all solvers."""

    tol_grad: float = 1e-9
    max_iter: int = 4000
    damping: float = 1.0
    newton_tol: float = 1e-11
    continuation_steps: int = 8

    def __post_init__(self) -> None:
        if not (self.tol_grad > 0.0):
            raise ParameterError(f"tol_grad must be > 0, got {self.tol_grad}")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class SolveReport:
    """A converged (or best-effort) solitary-wave profile with diagnostics."""

    u: RadialField
    phi: RadialField
    energy: EnergyReport
    iterations: int
    converged: bool
    positivity: bool
    params: Params
    method: str = ""
    residuals: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class BranchPoint:
    value: float
    report: SolveReport


@dataclass(frozen=True)
class Branch:
    """Ordered continuation points; parameter values strictly monotone."""

    parameter_name: Literal["c", "q"]
    points: tuple[BranchPoint, ...]
    truncated_at: float | None = None

    @property
    def truncated(self) -> bool:
        return self.truncated_at is not None


@dataclass(frozen=True)
class BranchSpec:
    parameter: Literal["c", "q"]
    targets: tuple[float, ...]


@dataclass(frozen=True)
class MountainPassLevel:
    """One-path upper bound for the mountain-pass level of the screened model."""

    t0: float
    e_hat: float
    t_hat: float


# -- report assembly ----------------------------------------------------------


def build_report(
    grid: RadialGrid,
    u_vals: Array,
    params: Params,
    iterations: int,
    converged: bool,
    method: str,
    residuals: dict[str, float] | None = None,
) -> SolveReport:
    from .functionals import action_nmkg, action_nsp

    u = RadialField(grid, u_vals)
    fr = solve_potential(u, params)
    if params.is_nsp:
        energy = action_nsp(u, params, phi=fr.phi)
    else:
        energy = action_nmkg(u, params, phi=fr.phi)
    amp = float(np.max(np.abs(u_vals))) if u_vals.size else 0.0
    positivity = bool(np.min(u_vals) >= -POSITIVITY_SLACK * amp)
    res = dict(residuals or {})
    res.setdefault("field", fr.residual)
    return SolveReport(
        u=u,
        phi=fr.phi,
        energy=energy,
        iterations=iterations,
        converged=converged,
        positivity=positivity,
        params=params,
        method=method,
        residuals=res,
    )


# -- shooting for the decoupled NLS ground state -------------------------------


def _shoot_profile(lam: float, p: float, amp: float, r_end: float, dense: bool = False):
    """Integrate u'' + (2/r)u' = lam u - |u|^{p-2}u from u(0)=amp, u'(0)=0.

    Returns (status, sol) where status is 'cross' (u hit zero), 'turn'
    (u' turned positive while u > 0) or 'end'.
    """

    def rhs(r: float, y: Array) -> list[float]:
        u, v = y
        return [v, lam * u - np.sign(u) * abs(u) ** (p - 1.0) - 2.0 * v / r]

    def ev_cross(r: float, y: Array) -> float:
        return y[0]

    ev_cross.terminal = True
    ev_cross.direction = -1.0

    def ev_turn(r: float, y: Array) -> float:
        return y[1]

    ev_turn.terminal = True
    ev_turn.direction = 1.0

    r0 = 1e-8 * r_end
    f0 = lam * amp - amp ** (p - 1.0)
    y0 = [amp + f0 * r0**2 / 6.0, f0 * r0 / 3.0]
    sol = solve_ivp(
        rhs,
        (r0, r_end),
        y0,
        rtol=1e-10,
        atol=1e-12 * amp,
        events=(ev_cross, ev_turn),
        dense_output=dense,
        method="RK45",
    )
    if sol.t_events[0].size:
        return "cross", sol
    if sol.t_events[1].size:
        return "turn", sol
    return "end", sol


def shoot_nls_values(grid: RadialGrid, params: Params, config: SolverConfig) -> tuple[Array, int]:
    """Ground state of -lap u + 2 m mu u = |u|^{p-2} u by overshoot/undershoot
    bisection on u(0), grafted onto the matched Yukawa tail e^{-sqrt(lam) r}/r."""
    lam = 2.0 * params.m * params.mu
    p = params.p
    rate = math.sqrt(lam)
    r_end = grid.r_max
    a_lo = (0.5 * p * lam) ** (1.0 / (p - 2.0))  # zero-energy amplitude: undershoots
    a_hi = a_lo
    for _ in range(60):
        a_hi *= 1.5
        status, _sol = _shoot_profile(lam, p, a_hi, r_end)
        if status == "cross":
            break
    else:
        raise NonConvergenceError("shooting: failed to bracket an overshoot amplitude")

    iterations = 0
    for _ in range(200):
        iterations += 1
        mid = 0.5 * (a_lo + a_hi)
        if mid == a_lo or mid == a_hi or (a_hi - a_lo) < 1e-15 * a_hi:
            break
        status, _sol = _shoot_profile(lam, p, mid, r_end)
        if status == "cross":
            a_hi = mid
        else:
            a_lo = mid
        if iterations >= config.max_iter:
            raise NonConvergenceError("shooting: bisection exhausted the iteration budget")

    amp = 0.5 * (a_lo + a_hi)
    status, sol = _shoot_profile(lam, p, amp, r_end, dense=True)
    r_stop = float(sol.t[-1])
    vals = np.zeros(grid.n + 1)
    vals[0] = amp
    # trust the trajectory down to a small fraction of the amplitude, then
    # graft the linearized far field u = C e^{-rate r} / r
    u_of = sol.sol
    # trajectories leave the stable manifold once the bisection bracket error,
    # amplified like e^{+rate r}, catches up with the decaying profile; stop
    # trusting them around 1e-7 of the amplitude
    r_trust = r_stop
    traj = u_of(np.minimum(grid.r[1:], r_stop))[0]
    cut = np.nonzero(traj < 1e-7 * amp)[0]
    if cut.size:
        r_trust = min(r_trust, grid.r[1:][cut[0]])
    inside = grid.r[1:] <= r_trust
    vals[1:][inside] = u_of(grid.r[1:][inside])[0]
    u_t = float(u_of(r_trust)[0])
    tail_c = u_t * r_trust * math.exp(rate * r_trust)
    out = ~inside
    vals[1:][out] = tail_c * np.exp(-rate * grid.r[1:][out]) / grid.r[1:][out]
    return vals, iterations


# -- generic Sobolev-gradient descent ------------------------------------------


def _value_and_phi(grid: RadialGrid, u_vals: Array, params: Params) -> tuple[float, Array, FunctionalScalars]:
    u = RadialField(grid, u_vals)
    phi = solve_potential(u, params).phi
    s = functional_scalars(u, params, positive_part=True, phi=phi)
    rep = _report_nsp(params, s, 0.0) if params.is_nsp else _report_nmkg(params, s, 0.0)
    return rep.action, phi.values, s


def _gradient(grid: RadialGrid, u_vals: Array, params: Params, phi_vals: Array) -> Array:
    if params.is_nsp:
        return gradient_values_nsp(grid, u_vals, params, phi_vals, positive_part=True)
    return gradient_values_nmkg(grid, u_vals, params, phi_vals, positive_part=True)


def _sobolev_descent(
    grid: RadialGrid,
    u0_vals: Array,
    params: Params,
    config: SolverConfig,
    project: bool = False,
) -> tuple[Array, int, bool]:
    """Preconditioned descent on the modified action; optional dilation
    projection keeps iterates on the Nehari-Pohozaev constraint."""
    prec = preconditioner_for(params, grid)

    def normalize(vals: Array) -> Array:
        v = vals.copy()
        v[-1] = 0.0
        if project:
            _, proj = project_nehari_pohozaev(RadialField(grid, v), params)
            v = proj.values.copy()
            v[-1] = 0.0
        return v

    u = normalize(u0_vals)
    value, phiv, _ = _value_and_phi(grid, u, params)
    tau = config.damping
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        g = _gradient(grid, u, params, phiv)
        gnorm = prec.dual_norm(g)
        if gnorm <= config.tol_grad:
            converged = True
            break
        if h1_norm_values(grid, u) < COLLAPSE_H1:
            raise CollapseToZeroError("descent collapsed to the trivial solution")
        d = prec.apply(g)
        gn2 = gnorm * gnorm
        accepted = False
        for _ in range(40):
            trial = normalize(u - tau * d)
            t_value, t_phiv, _ = _value_and_phi(grid, trial, params)
            if t_value <= value - 1e-4 * tau * gn2:
                u, value, phiv = trial, t_value, t_phiv
                tau = min(tau * 1.25, 4.0 * config.damping)
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            break  # line search stagnated at floating-point resolution
    if h1_norm_values(grid, u) < COLLAPSE_H1:
        raise CollapseToZeroError("descent collapsed to the trivial solution")
    return u, it, converged


# -- Newton-Krylov on the reduced nonlocal equation -----------------------------


def _phi_and_derivative_context(grid: RadialGrid, u_vals: Array, params: Params):
    """Screened/Newtonian potential plus a closure applying dPhi/du."""
    kappa = params.screening_coefficient
    beta = params.phi_source_coefficient
    field_res = solve_potential(RadialField(grid, u_vals), params)
    phiv = field_res.phi.values
    f = u_vals * u_vals

    if kappa == 0.0:

        def dphi(dv: Array) -> Array:
            return -newtonian_potential_values(grid, 2.0 * u_vals * dv * beta)

    else:

        def dphi(dv: Array) -> Array:
            rhs = -newtonian_potential_values(grid, 2.0 * u_vals * dv * (kappa * phiv + beta))
            if not np.any(rhs):
                return rhs
            from scipy.sparse.linalg import gmres

            op = LinearOperator(
                (grid.n + 1, grid.n + 1),
                matvec=lambda x: x + kappa * newtonian_potential_values(grid, f * x),
                dtype=float,
            )
            out, info = gmres(op, rhs, x0=rhs, rtol=1e-12, atol=0.0, restart=60, maxiter=40)
            if info != 0:
                raise JacobianSingularError("screened-potential linearization solve failed")
            return out

    return phiv, field_res.residual, dphi


def _local_jacobian_banded(grid: RadialGrid, diag_local: Array) -> Array:
    """Banded (W-weighted) matrix of the local Jacobian part on nodes 1..n-1."""
    n = grid.n
    rm2 = grid.cell_mid_r2
    h = grid.h
    w = grid.weights
    size = n - 1
    diag = np.empty(size)
    diag[0] = 4.0 * np.pi * (rm2[0] / 9.0 + rm2[1]) / h
    diag[1] = 4.0 * np.pi * (rm2[0] / 9.0 + rm2[1] + rm2[2]) / h
    j = np.arange(3, n)
    diag[2:] = 4.0 * np.pi * (rm2[j - 1] + rm2[j]) / h
    off = np.empty(size - 1)
    off[0] = -4.0 * np.pi * (rm2[0] / 9.0 + rm2[1]) / h
    off[1:] = -4.0 * np.pi * rm2[np.arange(2, n - 1)] / h
    diag = diag + w[1:n] * diag_local[1:n]
    ab = np.zeros((3, size))
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    return ab


def newton_coupled(
    grid: RadialGrid,
    seed_u: RadialField,
    params: Params,
    config: SolverConfig,
    krylov_restarts: int = 10,
) -> SolveReport:
    """Newton iteration on the coupled profile/potential system.

    The potential block is eliminated exactly through the Green-operator
    solve, so each Newton step inverts the reduced Jacobian
    T + B G_screened B (T the local tridiagonal part, B = 2u(kappa Phi + beta))
    by preconditioned Krylov iteration with the exact matrix-free action.
    Works for finite c and, with kappa = 0, for the Poisson model.
    """
    require_admissible(params)
    n = grid.n
    w = grid.weights
    act = slice(1, n)
    u = seed_u.values.copy()
    u[-1] = 0.0

    kappa = params.screening_coefficient
    beta = params.phi_source_coefficient
    mass_c = params.mass_coefficient
    p = params.p

    def res_norm(g: Array) -> float:
        return float(np.sqrt(np.dot(w[act], g[act] ** 2)))

    prev_norm = math.inf
    growth_streak = 0
    iterations = 0
    phi_residual = 0.0
    history: list[float] = []
    for iterations in range(1, min(config.max_iter, 200) + 1):
        phiv, phi_residual, dphi = _phi_and_derivative_context(grid, u, params)
        g = _gradient(grid, u, params, phiv)
        scale = max(1.0, h1_norm_values(grid, u))
        rnorm = res_norm(g)
        if rnorm <= config.newton_tol * scale:
            return build_report(
                grid, u, params, iterations, True, "newton",
                {"newton": rnorm, "field": phi_residual},
            )
        if rnorm > prev_norm * (1.0 - 1e-12):
            growth_streak += 1
            if growth_streak >= 5:
                raise DivergenceError(
                    f"newton residual grew for {growth_streak} consecutive steps "
                    f"(last {rnorm:.3e})"
                )
        else:
            growth_streak = 0
        prev_norm = rnorm
        history.append(rnorm)
        # quadratic convergence makes real progress fast; a residual that has
        # not even halved over eight iterations is stalling (fold vicinity)
        if len(history) > 8 and history[-1] > 0.5 * history[-9]:
            raise NonConvergenceError(
                f"newton stalled near residual {rnorm:.3e} (degenerate vicinity)"
            )

        diag_local = (
            mass_c
            - kappa * phiv**2
            - 2.0 * beta * phiv
            - (p - 1.0) * np.maximum(u, 0.0) ** (p - 2.0)
        )
        bvec = 2.0 * u * (kappa * phiv + beta)
        # the nonlocal block B G B is PSD with diagonal ~ B_j^2 h r_j; folding
        # it into the banded preconditioner tames the Krylov count on bulky
        # low-exponent solitons
        ab = _local_jacobian_banded(grid, diag_local + bvec**2 * grid.h * grid.r)

        def jmat(x: Array) -> Array:
            v = np.zeros(n + 1)
            v[act] = x
            out = kinetic_gradient_values(grid, v) + diag_local * v
            dp = dphi(v)
            out = out - bvec * dp
            return out[act]

        def pre(r: Array) -> Array:
            try:
                return solve_banded((1, 1), ab, w[act] * r)
            except Exception as exc:  # noqa: BLE001
                raise JacobianSingularError(f"local Jacobian factorization failed: {exc}") from exc

        size = n - 1
        jop = LinearOperator((size, size), matvec=jmat, dtype=float)
        mop = LinearOperator((size, size), matvec=pre, dtype=float)
        # the preconditioned system needs a handful of Krylov vectors when the
        # linearization is healthy; hitting this budget signals degeneracy
        delta, info = lgmres(
            jop, -g[act], M=mop, rtol=1e-11, atol=0.0, maxiter=krylov_restarts, inner_m=40
        )
        if not np.all(np.isfinite(delta)):
            raise JacobianSingularError("newton linear solve produced non-finite step")
        if info != 0:
            # the reported tolerance can sit just above the roundoff floor;
            # judge the step by the residual it actually achieved
            gnorm2 = float(np.linalg.norm(g[act]))
            achieved = float(np.linalg.norm(jmat(delta) + g[act])) / max(gnorm2, 1e-300)
            if achieved > 1e-6:
                raise JacobianSingularError(
                    f"newton linear solve did not converge (info={info}, "
                    f"relative residual {achieved:.2e}); the linearized operator "
                    "is numerically degenerate"
                )

        step = 1.0
        best = None
        for _ in range(8):
            trial = u.copy()
            trial[act] += step * delta
            t_phiv, _t_res, _ = _phi_and_derivative_context(grid, trial, params)
            t_norm = res_norm(_gradient(grid, trial, params, t_phiv))
            if t_norm < rnorm:
                best = trial
                break
            if best is None:
                best = trial
            step *= 0.5
        u = best
    raise NonConvergenceError(
        f"newton did not reach tol {config.newton_tol:g} in {iterations} iterations"
    )


# -- public solver operations ---------------------------------------------------


def solve_nls_ground(
    grid: RadialGrid,
    params: Params,
    config: SolverConfig | None = None,
    method: Literal["shooting", "descent"] = "shooting",
) -> SolveReport:
    """Positive radial ground state of -lap u + 2 m mu u = |u|^{p-2} u.

    ``method='shooting'`` integrates the radial ODE with bisection on u(0);
    ``method='descent'`` runs Nehari-rescaled Sobolev descent on the same
    discrete action (with the charge switched off) and polishes with Newton.
    The two routes are independent and are cross-checked in the test suite.
    """
    config = config or SolverConfig()
    if not (2.0 < params.p < 6.0):
        raise ParameterError(f"ground state needs 2 < p < 6, got p = {params.p}")
    nls = params.with_(q=0.0, c=math.inf)
    if method == "shooting":
        vals, iterations = shoot_nls_values(grid, nls, config)
        return build_report(grid, vals, nls, iterations, True, "nls-shooting")
    if method != "descent":
        raise ParameterError(f"unknown method {method!r}")
    vals, iterations = _nls_descent(grid, nls, config)
    rep = newton_coupled(grid, RadialField(grid, vals), nls, config)
    return replace(rep, iterations=iterations + rep.iterations, method="nls-descent")


def _nls_descent(grid: RadialGrid, nls: Params, config: SolverConfig) -> tuple[Array, int]:
    """Nehari-rescaled preconditioned descent for the decoupled equation."""
    lam = 2.0 * nls.m * nls.mu
    p = nls.p
    prec = preconditioner_for(nls, grid)

    def rescale(vals: Array) -> Array:
        v = vals.copy()
        v[-1] = 0.0
        a = kinetic_energy(grid, v)
        b = grid.integrate(v * v)
        d = grid.integrate(np.maximum(v, 0.0) ** p)
        if d <= 0.0:
            raise CollapseToZeroError("descent iterate lost its positive part")
        s = ((a + lam * b) / d) ** (1.0 / (p - 2.0))
        return s * v

    u = rescale(np.exp(-grid.r**2 * lam / 4.0))
    value, phiv, _ = _value_and_phi(grid, u, nls)
    tau = config.damping
    for it in range(1, config.max_iter + 1):
        g = _gradient(grid, u, nls, phiv)
        gnorm = prec.dual_norm(g)
        if gnorm <= max(config.tol_grad, 1e-10):
            return u, it
        d = prec.apply(g)
        gn2 = gnorm * gnorm
        accepted = False
        for _ in range(40):
            trial = rescale(u - tau * d)
            t_value, t_phiv, _ = _value_and_phi(grid, trial, nls)
            if t_value <= value - 1e-4 * tau * gn2:
                u, value, phiv = trial, t_value, t_phiv
                tau = min(tau * 1.25, 4.0)
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            return u, it
    return u, config.max_iter


def minimize_nsp_ground(
    grid: RadialGrid,
    params: Params,
    config: SolverConfig | None = None,
    seed: RadialField | None = None,
) -> SolveReport:
    """Ground state of the Poisson model for 3 < p < 6.

    Minimizes the modified action over the Nehari-Pohozaev constraint by
    alternating Sobolev descent and dilation projection, seeded from the
    decoupled ground state, then polishes with Newton.
    """
    config = config or SolverConfig()
    require_admissible(params)
    if not params.is_nsp:
        raise ParameterError("minimize_nsp_ground requires c = inf")
    if not (3.0 < params.p < 6.0):
        raise ParameterError(f"constrained minimization needs 3 < p < 6, got p = {params.p}")
    if seed is None:
        seed_vals, _ = shoot_nls_values(grid, params.with_(q=0.0), config)
    else:
        seed_vals = seed.values.copy()
    # descent only needs to reach Newton's basin; Newton does the last mile
    loose = replace(config, tol_grad=max(config.tol_grad, 1e-4), max_iter=min(config.max_iter, 800))
    vals, it_desc, _ = _sobolev_descent(grid, seed_vals, params, loose, project=True)
    if h1_norm_values(grid, vals) < COLLAPSE_H1:
        raise CollapseToZeroError("constrained minimization collapsed to zero")
    rep = newton_coupled(grid, RadialField(grid, vals), params, config)
    return replace(rep, iterations=it_desc + rep.iterations, method="nsp-ground")


def default_global_seed(grid: RadialGrid, params: Params) -> RadialField:
    """Large-amplitude broad bump for the global minimizer flow.

    Scans Gaussian profiles M exp(-(r/R)^2) over amplitudes and radii and
    returns the most negative modified action found.  The negative-energy
    region sits at amplitudes well above the zero-energy level of the
    decoupled equation (where the power term dominates the mass term) and
    radii where the quartic Coulomb repulsion has not yet caught up.
    """
    lam = params.mass_coefficient
    p = params.p
    amp0 = (0.5 * p * lam) ** (1.0 / (p - 2.0))
    best = None
    for radius in np.geomspace(0.3 / math.sqrt(lam), 0.45 * grid.r_max, 18):
        prof = np.exp(-((grid.r / radius) ** 2))
        prof[-1] = 0.0
        for s in np.geomspace(0.8, 80.0, 28):
            cand = s * amp0 * prof
            value, _, _ = _value_and_phi(grid, cand, params)
            if best is None or value < best[0]:
                best = (value, cand)
    return RadialField(grid, best[1])


def minimize_nsp_global(
    grid: RadialGrid,
    params: Params,
    config: SolverConfig | None = None,
    seed: RadialField | None = None,
) -> SolveReport:
    """Global minimizer of the modified Poisson-model action for 2 < p < 3.

    Runs unconstrained Sobolev descent from a large-amplitude broad seed;
    raises CollapseToZeroError when the flow reaches the trivial solution
    (the expected outcome for too large a charge).  The converged profile
    has negative action.
    """
    config = config or SolverConfig()
    require_admissible(params)
    if not params.is_nsp:
        raise ParameterError("minimize_nsp_global requires c = inf")
    if not (2.0 < params.p < 3.0):
        raise ParameterError(f"global minimization needs 2 < p < 3, got p = {params.p}")
    if seed is None:
        seed = default_global_seed(grid, params)
    seed_value, _, _ = _value_and_phi(grid, seed.values, params)
    if seed_value >= 0.0:
        raise CollapseToZeroError(
            "no negative-action seed found: the charge is too large for a "
            "nontrivial global minimizer (or the seed family is inadequate)"
        )
    loose = replace(config, tol_grad=max(config.tol_grad, 1e-4), max_iter=min(config.max_iter, 1500))
    vals, it_desc, _ = _sobolev_descent(grid, seed.values, params, loose, project=False)
    rep = newton_coupled(grid, RadialField(grid, vals), params, config)
    if h1_norm_values(grid, rep.u.values) < COLLAPSE_H1:
        raise CollapseToZeroError("global minimization collapsed to zero")
    return replace(rep, iterations=it_desc + rep.iterations, method="nsp-global")


# -- continuation ---------------------------------------------------------------


def _params_at(params0: Params, parameter: str, value: float) -> Params:
    if parameter == "c":
        return params0.with_(c=value)
    if parameter == "q":
        return params0.with_(q=value)
    raise ParameterError(f"unknown continuation parameter {parameter!r}")


def _c_to_z(c: float) -> float:
    return 0.0 if math.isinf(c) else 1.0 / (c * c)


def _z_to_c(z: float) -> float:
    return math.inf if z == 0.0 else 1.0 / math.sqrt(z)


MIN_CONTINUATION_STEP = 1e-8


def continuation(
    grid: RadialGrid,
    branch_spec: BranchSpec,
    params0: Params,
    seed: SolveReport,
    config: SolverConfig | None = None,
) -> Branch:
    """Warm-started parameter sweep from a converged seed.

    Steps through ``branch_spec.targets`` (in 1/c^2 for the light-speed
    parameter), bisecting the step on Newton failure down to a floor of
    1e-8; at the first unreachable target the branch is returned truncated.
    """
    config = config or SolverConfig()
    if not seed.converged:
        raise ParameterError("continuation requires a converged seed report")
    # warm starts converge in a handful of Newton steps; a tight per-trial
    # budget keeps fold probing (many failing attempts) affordable
    trial_config = replace(config, max_iter=min(config.max_iter, 40))
    parameter = branch_spec.parameter
    start = params0.c if parameter == "c" else params0.q
    to_coord: Callable[[float], float] = _c_to_z if parameter == "c" else (lambda x: x)
    from_coord: Callable[[float], float] = _z_to_c if parameter == "c" else (lambda x: x)

    points = [BranchPoint(value=start, report=seed)]
    u = seed.u.values.copy()
    cur = to_coord(start)
    truncated_at: float | None = None
    last_step: float | None = None

    for target_value in branch_spec.targets:
        tgt = to_coord(target_value)
        if tgt == cur:
            continue
        failed = False
        while cur != tgt:
            remaining = tgt - cur
            # classic step control: open the first stretch in a configured
            # number of substeps, then grow from the last accepted step
            # instead of re-attempting the whole remaining jump
            if last_step is None:
                step = remaining / max(1, config.continuation_steps)
            else:
                step = math.copysign(min(abs(remaining), 2.0 * abs(last_step)), remaining)
            while True:
                trial_coord = cur + step
                trial_params = _params_at(params0, parameter, from_coord(trial_coord))
                try:
                    rep = newton_coupled(
                        grid, RadialField(grid, u), trial_params, trial_config,
                        krylov_restarts=6,
                    )
                    # branch identity: a warm-started point must stay near its
                    # predecessor, otherwise Newton jumped to another solution
                    # (typical just past a fold) and the step must shrink
                    drift = h1_norm_values(grid, rep.u.values - u)
                    if drift > 0.3 * max(h1_norm_values(grid, u), 1e-30):
                        raise DivergenceError("warm start left the branch neighborhood")
                    break
                except (DivergenceError, NonConvergenceError, JacobianSingularError, CollapseToZeroError):
                    step *= 0.5
                    if abs(step) < MIN_CONTINUATION_STEP:
                        rep = None
                        break
            if rep is None:
                failed = True
                break
            last_step = step
            cur = trial_coord
            u = rep.u.values.copy()
            if cur == tgt:
                points.append(BranchPoint(value=from_coord(cur), report=rep))
        if failed:
            truncated_at = target_value
            break

    values = [pt.value for pt in points]
    diffs = np.diff(values)
    if diffs.size and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise NonConvergenceError("continuation produced non-monotone parameter values")
    return Branch(parameter_name=parameter, points=tuple(points), truncated_at=truncated_at)


# -- mountain-pass level ----------------------------------------------------------


def mountain_pass_level(
    u0_report: SolveReport,
    params: Params,
    n_coarse: int = 160,
) -> MountainPassLevel:
    """Upper mountain-pass level along the dilation path of a ground state.

    Finds t0 > 1 with negative path energy by doubling, then maximizes the
    modified action of the dilated profile over [0, t0]: exactly (root of
    the derivative polynomial) at c = inf, by coarse sampling plus
    golden-section refinement for finite c.
    """
    require_admissible(params)
    u0 = u0_report.u
    nsp = params.with_(c=math.inf)
    ps = path_scalars(u0, nsp)

    t0 = 2.0
    while path_energy_closed(ps, t0, nsp) >= 0.0:
        t0 *= 2.0
        if t0 > 1e6:
            raise NonConvergenceError(
                "no negative path energy found below t = 1e6 (exponent out of range?)"
            )

    if params.is_nsp:
        t_hat = float(brentq(lambda t: path_derivative_closed(ps, t, nsp), 1e-6, t0, xtol=1e-14))
        return MountainPassLevel(t0=t0, e_hat=path_energy_closed(ps, t_hat, nsp), t_hat=t_hat)

    def value(t: float) -> float:
        return scaling_path_energy(u0, t, params)

    ts = np.linspace(0.0, t0, n_coarse + 1)
    vals = np.array([value(t) for t in ts])
    k = int(np.argmax(vals))
    lo = ts[max(k - 1, 0)]
    hi = ts[min(k + 1, n_coarse)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - gr * (b - a)
    c2 = a + gr * (b - a)
    f1, f2 = value(c1), value(c2)
    for _ in range(60):
        if b - a < 1e-10 * max(1.0, t0):
            break
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + gr * (b - a)
            f2 = value(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - gr * (b - a)
            f1 = value(c1)
    t_hat = 0.5 * (a + b)
    return MountainPassLevel(t0=t0, e_hat=value(t_hat), t_hat=t_hat)
