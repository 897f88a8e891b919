"""Action, Nehari, Pohozaev and scaling-derivative functionals.

Nonrelativistic (Poisson) model, with phi_u the Newtonian potential:

    I(u) = 1/2 int |grad u|^2 + 2 m mu u^2 - q m u^2 phi_u dx - (1/p) int |u|^p dx
    J(u) = int |grad u|^2 + 2 m mu u^2 - 2 q m u^2 phi_u - |u|^p dx
    P(u) = int 1/2 |grad u|^2 + 3 m mu u^2 - 5/2 q m u^2 phi_u - (3/p)|u|^p dx
    G(u) = 2 J(u) - P(u)

Relativistic (screened) model, with Phi_u the screened potential,
kappa = (q/c)^2 and beta = q (m - mu/c^2):

    I(u) = 1/2 int |grad u|^2 + (2 m mu - mu^2/c^2) u^2 - beta u^2 Phi_u dx - (1/p) int |u|^p
    J(u) = int |grad u|^2 + (2 m mu - mu^2/c^2) u^2 - kappa u^2 Phi_u^2 - 2 beta u^2 Phi_u - |u|^p
    P(u) = int 1/2|grad u|^2 + 3/2 (2 m mu - mu^2/c^2) u^2 - kappa u^2 Phi_u^2
               - 5/2 beta u^2 Phi_u - (3/p)|u|^p

The modified ("positive part") variants replace |u|^p by max(u, 0)^p; their
nontrivial critical points are positive, so the two flavors agree on
converged solutions.

Discretization.  The kinetic term is the cell-midpoint Dirichlet form with
an even-extension closure of the origin cell, every nodal term uses the
r^2-trapezoid weights, and the potential couples through the self-adjoint
Green operator of :mod:`solwave.potentials`.  As a result the gradient
fields returned here are the *exact* variational gradients of the discrete
functionals: pairing them with any direction reproduces symmetric
difference quotients of the action to solver/roundoff precision, which is
the contract the finite-difference consistency tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import ParameterError, ProjectionError
from .grid import RadialField, RadialGrid, rescale_field
from .params import Params, require_admissible
from .potentials import solve_phi_c, solve_phi_infty

Array = NDArray[np.float64]


# -- discrete kinetic form ---------------------------------------------------


def cell_slopes(grid: RadialGrid, v: Array) -> Array:
    """Per-cell slopes (v_{j+1} - v_j)/h; the origin cell uses the slope of
    the even quadratic extension through (r_1, r_2), i.e. (v_2 - v_1)/(3h)."""
    d = np.diff(v) / grid.h
    d[0] = (v[2] - v[1]) / (3.0 * grid.h)
    return d


def kinetic_energy(grid: RadialGrid, v: Array) -> float:
    """Discrete Dirichlet energy int |grad u|^2 dx (midpoint flux form)."""
    d = cell_slopes(grid, v)
    return float(4.0 * np.pi * grid.h * np.dot(grid.cell_mid_r2, d * d))


def kinetic_gradient_values(grid: RadialGrid, v: Array) -> Array:
    """Exact weighted gradient of (1/2) kinetic_energy: a consistent -lap u.

    Node 0 carries the symmetry-stencil value as a diagnostic; it has zero
    quadrature weight and does not participate in any pairing.
    """
    d = cell_slopes(grid, v)
    flux = grid.cell_mid_r2 * d
    F = flux.copy()
    F[1] += flux[0] / 3.0
    F[0] = 0.0
    raw = np.empty(grid.n + 1)
    raw[1:-1] = F[:-1] - F[1:]
    raw[-1] = F[-1]
    out = np.empty(grid.n + 1)
    out[1:] = 4.0 * np.pi * raw[1:] / grid.weights[1:]
    out[0] = -6.0 * (v[1] - v[0]) / grid.h**2
    return out


# -- H1 preconditioner -------------------------------------------------------


class H1Preconditioner:
    """Inverse of the discrete (-lap + mass_coeff) form on interior nodes.

    Applying it to a strong-form residual yields the Sobolev-gradient
    descent direction; the induced dual norm is the H^{-1}-proxy reported as
    ``gradient_norm``.
    """

    def __init__(self, grid: RadialGrid, mass_coeff: float, include_end: bool = False):
        if mass_coeff <= 0.0:
            raise ParameterError(f"preconditioner needs a positive mass coefficient, got {mass_coeff}")
        self.grid = grid
        self.include_end = include_end
        n = grid.n
        last = n + 1 if include_end else n  # active nodes 1..last-1
        self._active = slice(1, last)
        rm2 = grid.cell_mid_r2
        h = grid.h
        w = grid.weights
        idx = np.arange(1, last)
        diag = np.empty(idx.size)
        diag[0] = 4.0 * np.pi * (rm2[0] / 9.0 + rm2[1]) / h
        if idx.size > 1:
            diag[1] = 4.0 * np.pi * (rm2[0] / 9.0 + rm2[1] + rm2[2]) / h
        if idx.size > 2:
            j = idx[2:]
            cap = np.where(j < n, rm2[np.minimum(j, n - 1)], 0.0)
            diag[2:] = 4.0 * np.pi * (rm2[j - 1] + cap) / h
        off = np.empty(max(idx.size - 1, 0))
        if off.size:
            off[0] = -4.0 * np.pi * (rm2[0] / 9.0 + rm2[1]) / h
            off[1:] = -4.0 * np.pi * rm2[idx[1:-1]] / h
        diag += mass_coeff * w[self._active]
        ab = np.zeros((2, idx.size))
        ab[0, 1:] = off
        ab[1, :] = diag
        self._chol = cholesky_banded(ab, lower=False)

    def apply(self, residual: Array) -> Array:
        """Solve the H1 form system for the descent direction; zero end values."""
        grid = self.grid
        rhs = (grid.weights * residual)[self._active]
        d_act = cho_solve_banded((self._chol, False), rhs)
        d = np.zeros(grid.n + 1)
        d[self._active] = d_act
        d[0] = (4.0 * d[1] - d[2]) / 3.0
        return d

    def dual_norm(self, residual: Array) -> float:
        grid = self.grid
        rhs = (grid.weights * residual)[self._active]
        d_act = cho_solve_banded((self._chol, False), rhs)
        return float(np.sqrt(max(np.dot(rhs, d_act), 0.0)))


@lru_cache(maxsize=64)
def _preconditioner(grid: RadialGrid, mass_coeff: float, include_end: bool) -> H1Preconditioner:
    return H1Preconditioner(grid, mass_coeff, include_end)


def preconditioner_for(params: Params, grid: RadialGrid, include_end: bool = False) -> H1Preconditioner:
    return _preconditioner(grid, params.mass_coefficient, include_end)


# -- functional scalars ------------------------------------------------------


@dataclass(frozen=True)
class FunctionalScalars:
    """The five integrals every functional is assembled from."""

    kinetic: float          # int |grad u|^2 dx
    mass: float             # int u^2 dx
    coulomb: float          # int u^2 phi dx   (phi <= 0)
    coulomb_sq: float       # int u^2 phi^2 dx (screened model only)
    power: float            # int |u|^p dx  or  int (u_+)^p dx


def _power_density(v: Array, p: float, positive_part: bool) -> Array:
    if positive_part:
        return np.maximum(v, 0.0) ** p
    return np.abs(v) ** p


def _power_gradient(v: Array, p: float, positive_part: bool) -> Array:
    if positive_part:
        return np.maximum(v, 0.0) ** (p - 1.0)
    return np.abs(v) ** (p - 2.0) * v


def functional_scalars(
    u: RadialField,
    params: Params,
    positive_part: bool = False,
    phi: RadialField | None = None,
) -> FunctionalScalars:
    grid = u.grid
    v = u.values
    if phi is None:
        phi = (solve_phi_infty(u, params) if params.is_nsp else solve_phi_c(u, params)).phi
    ph = phi.values
    u2 = v * v
    return FunctionalScalars(
        kinetic=kinetic_energy(grid, v),
        mass=grid.integrate(u2),
        coulomb=grid.integrate(u2 * ph),
        coulomb_sq=0.0 if params.is_nsp else grid.integrate(u2 * ph * ph),
        power=grid.integrate(_power_density(v, params.p, positive_part)),
    )


@dataclass(frozen=True)
class EnergyReport:
    """Values of the action and the critical-point identities at a field.

    ``scaling_derivative`` is the dilation derivative 2J - P, defined for
    the nonrelativistic model only.  ``scale`` is |kinetic| + mass-term and
    is the reference for "relative" tolerances on J and P.
    """

    action: float
    nehari: float
    pohozaev: float
    scaling_derivative: float | None
    gradient_norm: float
    scale: float


def _report_nsp(params: Params, s: FunctionalScalars, gradient_norm: float) -> EnergyReport:
    qm = params.q * params.m
    mmu = params.m * params.mu
    action = 0.5 * (s.kinetic + 2.0 * mmu * s.mass - qm * s.coulomb) - s.power / params.p
    nehari = s.kinetic + 2.0 * mmu * s.mass - 2.0 * qm * s.coulomb - s.power
    pohozaev = (
        0.5 * s.kinetic + 3.0 * mmu * s.mass - 2.5 * qm * s.coulomb - (3.0 / params.p) * s.power
    )
    return EnergyReport(
        action=action,
        nehari=nehari,
        pohozaev=pohozaev,
        scaling_derivative=2.0 * nehari - pohozaev,
        gradient_norm=gradient_norm,
        scale=abs(s.kinetic) + 2.0 * mmu * s.mass,
    )


def _report_nmkg(params: Params, s: FunctionalScalars, gradient_norm: float) -> EnergyReport:
    mc = params.mass_coefficient
    beta = params.phi_source_coefficient
    kappa = params.screening_coefficient
    action = 0.5 * (s.kinetic + mc * s.mass - beta * s.coulomb) - s.power / params.p
    nehari = (
        s.kinetic + mc * s.mass - kappa * s.coulomb_sq - 2.0 * beta * s.coulomb - s.power
    )
    pohozaev = (
        0.5 * s.kinetic
        + 1.5 * mc * s.mass
        - kappa * s.coulomb_sq
        - 2.5 * beta * s.coulomb
        - (3.0 / params.p) * s.power
    )
    return EnergyReport(
        action=action,
        nehari=nehari,
        pohozaev=pohozaev,
        scaling_derivative=None,
        gradient_norm=gradient_norm,
        scale=abs(s.kinetic) + mc * s.mass,
    )


# -- gradients (raw array core) ----------------------------------------------


def gradient_values_nsp(
    grid: RadialGrid, v: Array, params: Params, phi_vals: Array, positive_part: bool
) -> Array:
    return (
        kinetic_gradient_values(grid, v)
        + 2.0 * params.m * params.mu * v
        - 2.0 * params.q * params.m * v * phi_vals
        - _power_gradient(v, params.p, positive_part)
    )


def gradient_values_nmkg(
    grid: RadialGrid, v: Array, params: Params, phi_vals: Array, positive_part: bool
) -> Array:
    return (
        kinetic_gradient_values(grid, v)
        + params.mass_coefficient * v
        - params.screening_coefficient * v * phi_vals**2
        - 2.0 * params.phi_source_coefficient * v * phi_vals
        - _power_gradient(v, params.p, positive_part)
    )


# -- public operations --------------------------------------------------------


def action_nsp(
    u: RadialField,
    params: Params,
    positive_part: bool = False,
    phi: RadialField | None = None,
) -> EnergyReport:
    """Action, Nehari, Pohozaev, scaling derivative and gradient norm at u (c = inf)."""
    if not params.is_nsp:
        raise ParameterError("action_nsp requires c = inf")
    require_admissible(params)
    if phi is None:
        phi = solve_phi_infty(u, params).phi
    s = functional_scalars(u, params, positive_part, phi)
    g = gradient_values_nsp(u.grid, u.values, params, phi.values, positive_part)
    gnorm = preconditioner_for(params, u.grid).dual_norm(g)
    return _report_nsp(params, s, gnorm)


def action_nmkg(
    u: RadialField,
    params: Params,
    positive_part: bool = False,
    phi: RadialField | None = None,
) -> EnergyReport:
    """Action, Nehari and Pohozaev values at u for finite c."""
    if params.is_nsp:
        raise ParameterError("action_nmkg requires finite c")
    require_admissible(params)
    if phi is None:
        phi = solve_phi_c(u, params).phi
    s = functional_scalars(u, params, positive_part, phi)
    g = gradient_values_nmkg(u.grid, u.values, params, phi.values, positive_part)
    gnorm = preconditioner_for(params, u.grid).dual_norm(g)
    return _report_nmkg(params, s, gnorm)


def gradient_nsp(
    u: RadialField,
    params: Params,
    positive_part: bool = False,
    phi: RadialField | None = None,
) -> RadialField:
    """Strong-form residual -lap u + 2 m mu u - 2 q m u phi_u - |u|^{p-2} u.

    This is the exact variational gradient of the discrete action: its
    volume pairing with any direction equals the directional derivative.
    """
    if not params.is_nsp:
        raise ParameterError("gradient_nsp requires c = inf")
    if phi is None:
        phi = solve_phi_infty(u, params).phi
    return RadialField(u.grid, gradient_values_nsp(u.grid, u.values, params, phi.values, positive_part))


def gradient_nmkg(
    u: RadialField,
    params: Params,
    positive_part: bool = False,
    phi: RadialField | None = None,
) -> RadialField:
    """Strong-form residual of the screened model, nonlocal Phi_u(u) included."""
    if params.is_nsp:
        raise ParameterError("gradient_nmkg requires finite c")
    if phi is None:
        phi = solve_phi_c(u, params).phi
    return RadialField(u.grid, gradient_values_nmkg(u.grid, u.values, params, phi.values, positive_part))


def pair(grid: RadialGrid, a: Array, b: Array) -> float:
    """Volume inner product <a, b> = int a b dx."""
    return float(np.dot(grid.weights, a * b))


def energy_identity_gap(report: EnergyReport, params: Params, s: FunctionalScalars) -> float:
    """Relative defect of the (5p-12)/2 I - J + (4-p)/2 P combination.

    At any field this combination equals
    (p-3) kinetic + (p-2)/2 mass_coeff mass + (p-2)/2 kappa coulomb_sq;
    the defect measures pure floating-point noise for the implementation and
    is a strong internal-consistency check.
    """
    p = params.p
    lhs = 0.5 * (5.0 * p - 12.0) * report.action - report.nehari + 0.5 * (4.0 - p) * report.pohozaev
    rhs = (
        (p - 3.0) * s.kinetic
        + 0.5 * (p - 2.0) * params.mass_coefficient * s.mass
        + 0.5 * (p - 2.0) * params.screening_coefficient * s.coulomb_sq
    )
    scale = abs(s.kinetic) + params.mass_coefficient * s.mass + 1e-300
    return abs(lhs - rhs) / scale


def ground_energy_identity(params: Params, s: FunctionalScalars) -> float:
    """2(p-3)/(5p-12) kinetic + 2(p-2)/(5p-12) m mu mass.

    Equals the action at any critical point of the nonrelativistic model
    (combination of the Nehari and Pohozaev identities).
    """
    p = params.p
    return (2.0 * (p - 3.0) * s.kinetic + 2.0 * (p - 2.0) * params.m * params.mu * s.mass) / (
        5.0 * p - 12.0
    )


# -- scaling path gamma(t)(x) = t^2 u(t x) ------------------------------------


@dataclass(frozen=True)
class PathScalars:
    """Dilation-invariant ingredients of the scaling-path energy."""

    kinetic: float
    mass: float
    coulomb: float
    power_pos: float


def path_scalars(u0: RadialField, params: Params) -> PathScalars:
    phi = solve_phi_infty(u0, params).phi
    v = u0.values
    u2 = v * v
    grid = u0.grid
    return PathScalars(
        kinetic=kinetic_energy(grid, v),
        mass=grid.integrate(u2),
        coulomb=grid.integrate(u2 * phi.values),
        power_pos=grid.integrate(np.maximum(v, 0.0) ** params.p),
    )


def path_energy_closed(s: PathScalars, t: float, params: Params) -> float:
    """Modified nonrelativistic action along the dilation path, in closed form:

    (t^3/2) A + m mu t B - (q m/2) t^3 C - (t^(2p-3)/p) D.
    """
    p = params.p
    return (
        0.5 * t**3 * s.kinetic
        + params.m * params.mu * t * s.mass
        - 0.5 * params.q * params.m * t**3 * s.coulomb
        - t ** (2.0 * p - 3.0) / p * s.power_pos
    )


def path_derivative_closed(s: PathScalars, t: float, params: Params) -> float:
    """d/dt of the closed-form path energy:
    (3/2) t^2 A + m mu B - (3 q m/2) t^2 C - ((2p-3)/p) t^(2p-4) D."""
    p = params.p
    return (
        1.5 * t**2 * s.kinetic
        + params.m * params.mu * s.mass
        - 1.5 * params.q * params.m * t**2 * s.coulomb
        - (2.0 * p - 3.0) / p * t ** (2.0 * p - 4.0) * s.power_pos
    )


def scaling_path_energy(u0: RadialField, t: float, params: Params) -> float:
    """Modified action of the dilated profile t^2 u0(t x).

    c = inf uses the closed form above (exact in t); finite c resamples the
    dilation onto the grid and evaluates the modified screened action.
    """
    if t < 0.0:
        raise ParameterError(f"dilation parameter t must be >= 0, got {t}")
    if params.is_nsp:
        return path_energy_closed(path_scalars(u0, params), t, params)
    if t == 0.0:
        return 0.0
    ut = rescale_field(u0, t)
    phi = solve_phi_c(ut, params).phi
    s = functional_scalars(ut, params, positive_part=True, phi=phi)
    return _report_nmkg(params, s, 0.0).action


def project_nehari_pohozaev(u: RadialField, params: Params) -> tuple[float, RadialField]:
    """Dilation t* > 0 at which the scaling derivative vanishes, and the
    projected profile t*^2 u(t* x).

    Requires c = inf, 3 < p < 6 and a nontrivial positive part; the root is
    unique because the derivative polynomial has one sign change.
    """
    from scipy.optimize import brentq

    if not params.is_nsp:
        raise ParameterError("the dilation projection is defined for c = inf")
    if not (3.0 < params.p < 6.0):
        raise ParameterError(f"the dilation projection needs 3 < p < 6, got p = {params.p}")
    s = path_scalars(u, params)
    if s.power_pos <= 0.0 or s.kinetic == 0.0:
        raise ProjectionError("projection needs a nontrivial positive part (int (u_+)^p > 0)")

    def gfun(t: float) -> float:
        return path_derivative_closed(s, t, params)

    t_lo, t_hi = 1.0, 1.0
    while gfun(t_hi) > 0.0:
        t_hi *= 2.0
        if t_hi > 1e6:
            raise ProjectionError("no sign change of the scaling derivative below t = 1e6")
    while gfun(t_lo) < 0.0:
        t_lo *= 0.5
        if t_lo < 1e-6:
            raise ProjectionError("no sign change of the scaling derivative above t = 1e-6")
    if t_lo == t_hi:
        t_star = t_lo
    else:
        t_star = float(brentq(gfun, t_lo, t_hi, xtol=1e-15, rtol=8.881784197001252e-16))
    return t_star, rescale_field(u, t_star)
