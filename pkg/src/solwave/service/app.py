"""FastAPI service wrapping the solver suite.

Solves run synchronously in the request (desk-scale workloads); the CLI is
a thin client of these endpoints, either over HTTP or through an in-process
ASGI transport.  Solver failures surface as HTTP 400 with the failing
operation named; branch truncation is a successful response with the
``truncated`` flag set.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Any

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import SolwaveError
from ..params import admissible, regime_report
from ..serialization import solution_document
from ..solvers import (
    BranchSpec,
    SolveReport,
    continuation,
    minimize_nsp_global,
    minimize_nsp_ground,
    solve_nls_ground,
)
from ..studies import (
    nonexistence_sweep,
    nonrelativistic_limit_study,
    two_branch_study,
)
from .schemas import (
    AdmissibilityResponse,
    HealthResponse,
    LimitStudyRequest,
    LimitStudyResponse,
    NonexistenceRequest,
    NonexistenceResponse,
    RegimeRequest,
    RegimeResponse,
    SolveRequest,
    SolutionResponse,
    TwoBranchRequest,
    TwoBranchResponse,
)


def _guard(operation: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SolwaveError as exc:
        raise HTTPException(
            status_code=400,
            detail={"operation": operation, "error": type(exc).__name__, "message": str(exc)},
        ) from exc


def _resolve_branch(branch: str, p: float) -> str:
    if branch != "auto":
        return branch
    if 3.0 < p < 6.0:
        return "ground"
    if 2.0 < p < 3.0:
        return "global"
    raise HTTPException(
        status_code=400,
        detail={
            "operation": "solve-nsp",
            "error": "ParameterError",
            "message": f"no default branch for p = {p}; need 2 < p < 3 or 3 < p < 6",
        },
    )


def _nsp_solution(req: SolveRequest, operation: str) -> SolveReport:
    from ..params import require_admissible

    params = req.params.to_core().with_(c=math.inf)
    grid = req.grid.to_core()
    config = req.solver.to_core()
    _guard(operation, require_admissible, params)
    branch = _resolve_branch(req.branch, params.p)
    if branch == "ground":
        return _guard(operation, minimize_nsp_ground, grid, params, config)
    if branch == "global":
        return _guard(operation, minimize_nsp_global, grid, params, config)
    # perturbative: charge continuation from the decoupled ground state
    def run() -> SolveReport:
        w0 = solve_nls_ground(grid, params.with_(q=0.0), config)
        if params.q == 0.0:
            return w0
        br = continuation(grid, BranchSpec("q", (params.q,)), params.with_(q=0.0), w0, config)
        if br.truncated or br.points[-1].value != params.q:
            raise SolwaveError(
                f"perturbative branch unreachable at q = {params.q:g} "
                f"(continuation stopped at q = {br.points[-1].value:g})"
            )
        return br.points[-1].report

    return _guard(operation, run)


def _dataclass_dict(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _dataclass_dict(v) for k, v in dataclasses.asdict(obj).items()}
    return obj


def create_app() -> FastAPI:
    app = FastAPI(
        title="solwave",
        description=(
            "Radial solitary waves of the electrostatic Maxwell-Klein-Gordon "
            "and Schrodinger-Poisson systems, with nonrelativistic-limit studies."
        ),
        version=__version__,
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/report/admissibility", response_model=AdmissibilityResponse)
    def admissibility(req: RegimeRequest) -> AdmissibilityResponse:
        adm = _guard("admissible", admissible, req.params.to_core())
        return AdmissibilityResponse(
            ok=adm.ok, failures=list(adm.failures), diagnostics=dict(adm.diagnostics)
        )

    @app.post("/report/regime", response_model=RegimeResponse)
    def regime(req: RegimeRequest) -> RegimeResponse:
        rep = _guard("regime-report", regime_report, req.params.to_core())
        return RegimeResponse(
            p=rep.p,
            omega=rep.omega,
            m_bar=rep.m_bar,
            conditions=dict(rep.conditions),
            nonexistent=rep.nonexistent,
            values=dict(rep.values),
        )

    @app.post("/solve/nls", response_model=SolutionResponse)
    def solve_nls(req: SolveRequest) -> SolutionResponse:
        rep = _guard(
            "solve-nls",
            solve_nls_ground,
            req.grid.to_core(),
            req.params.to_core(),
            req.solver.to_core(),
            req.method,
        )
        return SolutionResponse(document=solution_document(rep))

    @app.post("/solve/nsp", response_model=SolutionResponse)
    def solve_nsp(req: SolveRequest) -> SolutionResponse:
        rep = _nsp_solution(req, "solve-nsp")
        return SolutionResponse(document=solution_document(rep))

    @app.post("/solve/nmkg", response_model=SolutionResponse)
    def solve_nmkg(req: SolveRequest) -> SolutionResponse:
        params = req.params.to_core()
        if params.is_nsp:
            raise HTTPException(
                status_code=400,
                detail={
                    "operation": "solve-nmkg",
                    "error": "ParameterError",
                    "message": "solve-nmkg requires a finite c; use solve-nsp for c = inf",
                },
            )
        grid = req.grid.to_core()
        config = req.solver.to_core()
        seed = _nsp_solution(
            SolveRequest(
                params=req.params.model_copy(update={"c": "inf"}),
                grid=req.grid,
                solver=req.solver,
                method=req.method,
                branch=req.branch,
            ),
            "solve-nmkg",
        )
        br = _guard(
            "solve-nmkg",
            continuation,
            grid,
            BranchSpec("c", (params.c,)),
            params.with_(c=math.inf),
            seed,
            config,
        )
        last = br.points[-1].report
        achieved = br.points[-1].value
        return SolutionResponse(
            document=solution_document(last),
            truncated=br.truncated,
            achieved_c="inf" if math.isinf(achieved) else achieved,
        )

    @app.post("/studies/limit", response_model=LimitStudyResponse)
    def limit_study(req: LimitStudyRequest) -> LimitStudyResponse:
        result = _guard(
            "limit-study",
            nonrelativistic_limit_study,
            req.grid.to_core(),
            req.params.to_core().with_(c=math.inf),
            tuple(req.c_list),
            req.solver.to_core(),
        )
        fitted = result.fitted_order
        return LimitStudyResponse(
            e_infinity=result.e_infinity,
            fitted_order=None if math.isnan(fitted) else fitted,
            rows=[_dataclass_dict(r) for r in result.rows],
            truncated=result.truncated,
            reference=solution_document(result.reference),
        )

    @app.post("/studies/two-branch", response_model=TwoBranchResponse)
    def two_branch(req: TwoBranchRequest) -> TwoBranchResponse:
        result = _guard(
            "two-branch-study",
            two_branch_study,
            req.grid.to_core(),
            req.params.to_core().with_(c=math.inf),
            tuple(req.q_list),
            tuple(req.c_list),
            req.solver.to_core(),
            req.jobs,
        )
        truncated = any(
            cell.collapse is not None
            or (cell.perturbative is not None and cell.perturbative.truncated)
            or (cell.global_min is not None and cell.global_min.truncated)
            for cell in result.cells
        )
        return TwoBranchResponse(
            cells=[_dataclass_dict(c) for c in result.cells],
            global_min_h1_by_q=[[q, h] for q, h in result.global_min_h1_by_q],
            notes=list(result.notes),
            truncated=truncated,
        )

    @app.post("/studies/nonexistence", response_model=NonexistenceResponse)
    def nonexistence(req: NonexistenceRequest) -> NonexistenceResponse:
        grid = req.grid.to_core() if req.grid is not None else None
        rep = _guard(
            "nonexistence-sweep",
            nonexistence_sweep,
            req.params.to_core(),
            grid,
            req.solver.to_core(),
        )
        return NonexistenceResponse(
            validation=[
                {"p": p, "accepted": ok, "message": msg} for p, ok, msg in rep.validation
            ],
            diagnostics=[_dataclass_dict(d) for d in rep.diagnostics],
        )

    return app
