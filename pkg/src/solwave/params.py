"""Model parameters, admissibility checks and existence-regime predicates.

The parameter set is (m, mu, q, c, p): particle mass, standing-wave
frequency shift, coupling charge, speed of light and nonlinearity exponent.
Setting c = inf selects the Schrodinger-Poisson (nonrelativistic) model;
finite c selects the electrostatic Maxwell-Klein-Gordon model, for which the
equivalent relativistic triple is

    m_bar = m c,   e = q / c,   omega = (m c^2 - mu) / c,

with 0 < omega < m_bar exactly when c > sqrt(mu / m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any

from .errors import ParameterError

INF = math.inf


@dataclass(frozen=True)
class Params:
    """Physical and model parameters.

    q = 0 is allowed and means the decoupled nonlinear-Schrodinger limit
    (the electrostatic field vanishes identically); continuation branches in
    the charge start there.
    """

    m: float
    mu: float
    q: float
    c: float = INF
    p: float = 4.0

    def __post_init__(self) -> None:
        for name in ("m", "mu", "q", "c", "p"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ParameterError(f"parameter {name} must be a real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not (self.m > 0.0 and math.isfinite(self.m)):
            raise ParameterError(f"mass m must be finite and > 0, got {self.m}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ParameterError(f"frequency parameter mu must be finite and > 0, got {self.mu}")
        if not (self.q >= 0.0 and math.isfinite(self.q)):
            raise ParameterError(f"charge q must be finite and >= 0, got {self.q}")
        if self.c <= 0.0 or math.isnan(self.c):
            raise ParameterError(f"speed of light c must be > 0 (or inf), got {self.c}")
        if not (self.p > 0.0 and math.isfinite(self.p)):
            raise ParameterError(f"exponent p must be finite and > 0, got {self.p}")

    # -- relativistic reparametrization (finite c only) ---------------------

    @property
    def is_nsp(self) -> bool:
        """True for the c = inf (Schrodinger-Poisson) model."""
        return math.isinf(self.c)

    @property
    def m_bar(self) -> float:
        self._require_finite_c("m_bar")
        return self.m * self.c

    @property
    def omega(self) -> float:
        self._require_finite_c("omega")
        return (self.m * self.c**2 - self.mu) / self.c

    @property
    def e_charge(self) -> float:
        self._require_finite_c("e_charge")
        return self.q / self.c

    def _require_finite_c(self, what: str) -> None:
        if self.is_nsp:
            raise ParameterError(f"{what} is only defined for finite c")

    # -- coefficients of the reduced scalar equations -----------------------

    @property
    def mass_coefficient(self) -> float:
        """Coefficient of the linear term: 2 m mu - mu^2/c^2 (= m_bar^2 - omega^2)."""
        if self.is_nsp:
            return 2.0 * self.m * self.mu
        return 2.0 * self.m * self.mu - (self.mu / self.c) ** 2

    @property
    def phi_source_coefficient(self) -> float:
        """Source strength of the potential equation: q (m - mu/c^2) (-> q m)."""
        if self.is_nsp:
            return self.q * self.m
        return self.q * (self.m - self.mu / self.c**2)

    @property
    def screening_coefficient(self) -> float:
        """Screening strength (q/c)^2; zero in the Poisson limit."""
        if self.is_nsp:
            return 0.0
        return (self.q / self.c) ** 2

    @property
    def phi_lower_bound(self) -> float:
        """Maximum-principle floor -(c^2/q)(m - mu/c^2) of the screened potential."""
        self._require_finite_c("phi_lower_bound")
        if self.q == 0.0:
            return -INF
        return -(self.c**2 / self.q) * (self.m - self.mu / self.c**2)

    def with_(self, **kw: Any) -> "Params":
        return replace(self, **kw)


# -- admissibility ----------------------------------------------------------


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    failures: tuple[str, ...]
    diagnostics: dict[str, float | bool]


def c_threshold(params: Params) -> float:
    """Smallest admissible speed of light, sqrt(mu/m)."""
    return math.sqrt(params.mu / params.m)


def admissible(params: Params) -> Admissibility:
    """True iff p lies in (2, 6) and c = inf or c > sqrt(mu/m).

    Outside 2 < p < 6 no nontrivial solutions exist (Pohozaev obstruction);
    below the c threshold the frequency omega = (m c^2 - mu)/c turns
    nonpositive and the standing-wave reduction degenerates.  Diagnostics
    also report the two positivity thresholds discussed in the literature:
    c >= sqrt(2m/mu) as usually quoted, and c > sqrt(mu/(2m)), the value
    that makes the linear coefficient 2 m mu - mu^2/c^2 positive.
    """
    failures: list[str] = []
    if not (2.0 < params.p < 6.0):
        failures.append(
            f"no nontrivial solutions for p <= 2 or p >= 6; need 2 < p < 6, got p = {params.p}"
        )
    thresh = c_threshold(params)
    if not params.is_nsp and params.c <= thresh:
        failures.append(
            f"requires c > sqrt(mu/m) = {thresh:.6g}, got c = {params.c}"
        )
    diags: dict[str, float | bool] = {
        "c_threshold": thresh,
        "positivity_threshold_quoted": math.sqrt(2.0 * params.m / params.mu),
        "positivity_threshold_mass_coeff": math.sqrt(params.mu / (2.0 * params.m)),
        "mass_coefficient": params.mass_coefficient,
        "mass_coefficient_positive": params.mass_coefficient > 0.0,
    }
    if not params.is_nsp and params.c > thresh:
        diags["omega"] = params.omega
        diags["m_bar"] = params.m_bar
        diags["positivity_quoted_holds"] = params.c >= math.sqrt(2.0 * params.m / params.mu)
    return Admissibility(ok=not failures, failures=tuple(failures), diagnostics=diags)


def require_admissible(params: Params) -> None:
    adm = admissible(params)
    if not adm.ok:
        raise ParameterError("; ".join(adm.failures))


# -- existence-regime predicates from the literature ------------------------


def omega_ratio_bound(p: float) -> float:
    """Piecewise bound g on omega/m_bar: sqrt((p-2)(4-p)) for 2 < p < 3, 1 for 3 <= p < 4."""
    if not (2.0 < p < 4.0):
        raise ParameterError(f"omega ratio bound is defined for 2 < p < 4, got p = {p}")
    if p < 3.0:
        return math.sqrt((p - 2.0) * (4.0 - p))
    return 1.0


def frequency_weight(p: float) -> float:
    """Wang's weight h(p) = 1 + (4-p)^2 / (4(p-2)) for 2 < p < 4."""
    if not (2.0 < p < 4.0):
        raise ParameterError(f"frequency weight is defined for 2 < p < 4, got p = {p}")
    return 1.0 + (4.0 - p) ** 2 / (4.0 * (p - 2.0))


@dataclass(frozen=True)
class RegimeReport:
    """Which of the known sufficient existence conditions hold at the parameters."""

    p: float
    omega: float
    m_bar: float
    conditions: dict[str, bool]
    nonexistent: bool
    values: dict[str, float]

    def satisfied(self) -> list[str]:
        return [k for k, v in self.conditions.items() if v]

    def violated(self) -> list[str]:
        return [k for k, v in self.conditions.items() if not v]


def regime_report(params: Params) -> RegimeReport:
    """Evaluate the classical sufficient conditions for finite-c solitary waves.

    Conditions (all stated for 0 < omega < m_bar):
      benci_fortunato        4 < p < 6
      daprile_mugnai         4 <= p < 6, or 2 < p < 4 and sqrt(2) omega < m_bar sqrt(p-2)
      azzollini_pisani_pomponio   2 < p < 4 and omega < m_bar * g(p)
      azzollini_pomponio     4 <= p < 6, or 2 < p < 4 and m_bar sqrt(p-1) > omega sqrt(5-p)
      wang                   2 < p < 4 and sqrt(h(p)) omega < m_bar
    plus the nonexistence range p <= 2 or p >= 6.
    """
    if params.is_nsp:
        raise ParameterError("regime report requires finite c")
    require_admissible(params)
    p = params.p
    w = params.omega
    mb = params.m_bar
    base = 0.0 < w < mb
    mid = 2.0 < p < 4.0
    high = 4.0 <= p < 6.0

    g = omega_ratio_bound(p) if mid else math.nan
    h = frequency_weight(p) if mid else math.nan
    conditions = {
        "benci_fortunato": 4.0 < p < 6.0 and base,
        "daprile_mugnai": (high and base) or (mid and 0.0 < math.sqrt(2.0) * w < mb * math.sqrt(p - 2.0)),
        "azzollini_pisani_pomponio": mid and 0.0 < w < mb * g,
        "azzollini_pomponio": (high and base) or (mid and mb * math.sqrt(p - 1.0) > w * math.sqrt(5.0 - p)),
        "wang": mid and 0.0 < math.sqrt(h) * w < mb,
    }
    values: dict[str, float] = {"omega": w, "m_bar": mb, "omega_over_m_bar": w / mb}
    if mid:
        values["omega_ratio_bound"] = g
        values["frequency_weight"] = h
    return RegimeReport(
        p=p,
        omega=w,
        m_bar=mb,
        conditions=conditions,
        nonexistent=(p <= 2.0 or p >= 6.0),
        values=values,
    )
