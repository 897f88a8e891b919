"""Pydantic request/response models for the solver service.

The speed of light travels over the wire as the string "inf" or a positive
float (JSON has no infinity literal).  Responses embed full solution
documents so clients can reconstruct fields exactly.
"""

from __future__ import annotations

import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..grid import make_grid
from ..params import Params
from ..solvers import SolverConfig


class ParamsModel(BaseModel):
    m: float = Field(..., gt=0, description="particle mass")
    mu: float = Field(..., gt=0, description="standing-wave frequency shift")
    q: float = Field(..., ge=0, description="coupling charge (0 = decoupled limit)")
    c: float | Literal["inf"] = Field("inf", description="speed of light; 'inf' selects the Poisson model")
    p: float = Field(..., gt=0, description="nonlinearity exponent")

    @field_validator("c")
    @classmethod
    def _positive_c(cls, v: float | str) -> float | str:
        if isinstance(v, (int, float)) and not v > 0:
            raise ValueError("c must be positive")
        return v

    def to_core(self) -> Params:
        c = math.inf if self.c == "inf" else float(self.c)
        return Params(m=self.m, mu=self.mu, q=self.q, c=c, p=self.p)

    @classmethod
    def from_core(cls, params: Params) -> "ParamsModel":
        return cls(
            m=params.m,
            mu=params.mu,
            q=params.q,
            c="inf" if params.is_nsp else params.c,
            p=params.p,
        )


class GridModel(BaseModel):
    n: int = Field(2000, ge=16)
    r_max: float = Field(30.0, gt=0)

    def to_core(self):
        return make_grid(self.n, self.r_max)


class SolverConfigModel(BaseModel):
    tol_grad: float = Field(1e-9, gt=0)
    max_iter: int = Field(4000, ge=1)
    damping: float = Field(1.0, gt=0)
    newton_tol: float = Field(1e-11, gt=0)
    continuation_steps: int = Field(8, ge=1)

    def to_core(self) -> SolverConfig:
        return SolverConfig(
            tol_grad=self.tol_grad,
            max_iter=self.max_iter,
            damping=self.damping,
            newton_tol=self.newton_tol,
            continuation_steps=self.continuation_steps,
        )


class SolveRequest(BaseModel):
    params: ParamsModel
    grid: GridModel = GridModel()
    solver: SolverConfigModel = SolverConfigModel()
    method: Literal["shooting", "descent"] = "shooting"
    branch: Literal["auto", "ground", "global", "perturbative"] = "auto"


class SolutionResponse(BaseModel):
    document: dict[str, Any]
    truncated: bool = False
    achieved_c: Optional[float | str] = None


class LimitStudyRequest(BaseModel):
    params: ParamsModel
    grid: GridModel = GridModel()
    solver: SolverConfigModel = SolverConfigModel()
    c_list: list[float] = Field(..., min_length=0)


class LimitStudyResponse(BaseModel):
    e_infinity: float
    fitted_order: Optional[float]
    rows: list[dict[str, float]]
    truncated: bool
    reference: dict[str, Any]


class TwoBranchRequest(BaseModel):
    params: ParamsModel
    grid: GridModel = GridModel()
    solver: SolverConfigModel = SolverConfigModel()
    q_list: list[float] = Field(..., min_length=1)
    c_list: list[float] = Field(..., min_length=1)
    jobs: int = Field(1, ge=1)


class TwoBranchResponse(BaseModel):
    cells: list[dict[str, Any]]
    global_min_h1_by_q: list[list[float]]
    notes: list[str]
    truncated: bool


class RegimeRequest(BaseModel):
    params: ParamsModel


class RegimeResponse(BaseModel):
    p: float
    omega: float
    m_bar: float
    conditions: dict[str, bool]
    nonexistent: bool
    values: dict[str, float]


class AdmissibilityResponse(BaseModel):
    ok: bool
    failures: list[str]
    diagnostics: dict[str, Any]


class NonexistenceRequest(BaseModel):
    params: ParamsModel
    grid: Optional[GridModel] = None
    solver: SolverConfigModel = SolverConfigModel()


class NonexistenceResponse(BaseModel):
    validation: list[dict[str, Any]]
    diagnostics: list[dict[str, Any]]


class HealthResponse(BaseModel):
    status: str
    version: str
