"""Solution documents and table writers.

A solution file embeds the full parameter set and grid next to the nodal
values (a field without its parameters is scientifically meaningless) and
round-trips exactly: floats are emitted with repr precision, so reloaded
fields equal the originals bit for bit.  All writers are write-then-rename,
so a failed run never leaves a partial artifact behind.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any, Iterable, Sequence

from .functionals import EnergyReport
from .grid import RadialField, make_grid
from .params import Params
from .solvers import SolveReport


def _c_to_wire(c: float) -> float | str:
    return "inf" if math.isinf(c) else c


def c_from_wire(value: Any) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        return float(value)
    return float(value)


def params_to_dict(params: Params) -> dict[str, Any]:
    return {
        "m": params.m,
        "mu": params.mu,
        "q": params.q,
        "c": _c_to_wire(params.c),
        "p": params.p,
    }


def params_from_dict(d: dict[str, Any]) -> Params:
    return Params(m=d["m"], mu=d["mu"], q=d["q"], c=c_from_wire(d.get("c", "inf")), p=d["p"])


def energy_to_dict(e: EnergyReport) -> dict[str, Any]:
    return {
        "action": e.action,
        "nehari": e.nehari,
        "pohozaev": e.pohozaev,
        "scaling_derivative": e.scaling_derivative,
        "gradient_norm": e.gradient_norm,
        "scale": e.scale,
    }


def energy_from_dict(d: dict[str, Any]) -> EnergyReport:
    return EnergyReport(
        action=d["action"],
        nehari=d["nehari"],
        pohozaev=d["pohozaev"],
        scaling_derivative=d.get("scaling_derivative"),
        gradient_norm=d["gradient_norm"],
        scale=d["scale"],
    )


def solution_document(report: SolveReport) -> dict[str, Any]:
    grid = report.u.grid
    return {
        "kind": "solwave-solution",
        "params": params_to_dict(report.params),
        "grid": {"n": grid.n, "r_max": grid.r_max},
        "values": report.u.values.tolist(),
        "phi_values": report.phi.values.tolist(),
        "energy": energy_to_dict(report.energy),
        "iterations": report.iterations,
        "converged": report.converged,
        "positivity": report.positivity,
        "method": report.method,
        "residuals": dict(report.residuals),
    }


def solution_from_document(doc: dict[str, Any]) -> SolveReport:
    grid = make_grid(int(doc["grid"]["n"]), float(doc["grid"]["r_max"]))
    return SolveReport(
        u=RadialField(grid, doc["values"]),
        phi=RadialField(grid, doc["phi_values"]),
        energy=energy_from_dict(doc["energy"]),
        iterations=int(doc["iterations"]),
        converged=bool(doc["converged"]),
        positivity=bool(doc["positivity"]),
        params=params_from_dict(doc["params"]),
        method=doc.get("method", ""),
        residuals=dict(doc.get("residuals", {})),
    )


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj: dict[str, Any]) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=1))


def read_json(path: str) -> dict[str, Any]:
    with open(path) as handle:
        return json.load(handle)


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = [format_float(v) if isinstance(v, float) else str(v) for v in row]
        lines.append(",".join(cells))
    _atomic_write_text(path, "\n".join(lines) + "\n")
