"""Command-line client of the solver service.

The CLI builds requests from flags and an optional flat key=value config
file, sends them to the service (an in-process ASGI transport by default,
or a remote instance via --server), and writes the returned artifacts:
a JSON document per solve, CSV tables per study.  Exit codes: 0 success,
2 branch truncation, 1 any error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Any, Sequence

import httpx

from .params import Params, admissible

CONFIG_KEYS = {
    "m": float,
    "mu": float,
    "q": float,
    "c": str,
    "p": float,
    "n": int,
    "r_max": float,
    "tol_grad": float,
    "max_iter": int,
    "c_list": str,
    "q_list": str,
    "out": str,
    "format": str,
}

SOLVE_COMMANDS = ("solve-nls", "solve-nsp", "solve-nmkg")
STUDY_COMMANDS = ("limit-study", "two-branch-study", "regime-report", "nonexistence-sweep")


class CliError(Exception):
    def __init__(self, operation: str, message: str):
        super().__init__(message)
        self.operation = operation


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors, per the CLI contract."""

    def error(self, message: str) -> None:  # noqa: D401
        self.print_usage(sys.stderr)
        print(f"error in parse-config: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_float_list(text: str, operation: str, key: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise CliError(operation, f"{key} must be a comma-separated number list, got {text!r}") from exc


def read_config_file(path: str, operation: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise CliError(operation, f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(operation, f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in CONFIG_KEYS:
            raise CliError(operation, f"{path}:{lineno}: unknown config key {key!r}")
        caster = CONFIG_KEYS[key]
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise CliError(
                operation, f"{path}:{lineno}: key {key!r} expects {caster.__name__}, got {val!r}"
            ) from exc
    return values


def _wire_c(text: str | float | None) -> float | str:
    if text is None:
        return "inf"
    if isinstance(text, str):
        if text.lower() in ("inf", "infinity"):
            return "inf"
        return float(text)
    return float(text)


def _add_common(sub: argparse.ArgumentParser, need_params: bool = True) -> None:
    sub.add_argument("--config", help="flat key = value config file; flags override it")
    sub.add_argument("--server", help="base URL of a running service (default: in-process)")
    sub.add_argument("--out", help="output directory (default: $SOLITON_OUT_DIR or .)")
    sub.add_argument("--format", choices=("csv", "json", "both"), help="table output format")
    sub.add_argument("--jobs", type=int, default=1, help="sweep parallelism degree")
    if need_params:
        sub.add_argument("--m", type=float, help="particle mass")
        sub.add_argument("--mu", type=float, help="frequency parameter")
        sub.add_argument("--q", type=float, help="coupling charge")
        sub.add_argument("--c", help="speed of light (number or 'inf')")
        sub.add_argument("--p", type=float, help="nonlinearity exponent")
        sub.add_argument("--n", type=int, help="grid cells (>= 16)")
        sub.add_argument("--r_max", type=float, help="domain radius")
        sub.add_argument("--tol_grad", type=float, help="gradient-norm stopping threshold")
        sub.add_argument("--max_iter", type=int, help="iteration budget")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="solwave", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    for name, extra in (
        ("solve-nls", ("method",)),
        ("solve-nsp", ("branch",)),
        ("solve-nmkg", ("branch",)),
    ):
        sub = subs.add_parser(name, help=f"{name.replace('-', ' ')} and write a solution document")
        _add_common(sub)
        if "method" in extra:
            sub.add_argument("--method", choices=("shooting", "descent"), default="shooting")
        if "branch" in extra:
            sub.add_argument(
                "--branch", choices=("auto", "ground", "global", "perturbative"), default="auto"
            )

    sub = subs.add_parser("limit-study", help="nonrelativistic-limit convergence study")
    _add_common(sub)
    sub.add_argument("--c_list", help="comma-separated speeds of light")

    sub = subs.add_parser("two-branch-study", help="two-solution structure for 2 < p < 3")
    _add_common(sub)
    sub.add_argument("--c_list", help="comma-separated speeds of light")
    sub.add_argument("--q_list", help="comma-separated charges")

    sub = subs.add_parser("regime-report", help="evaluate known existence conditions")
    _add_common(sub)

    sub = subs.add_parser("nonexistence-sweep", help="validation outcomes across exponents")
    _add_common(sub)
    sub.add_argument("--diagnostic-flows", action="store_true", help="run the near-critical descent flows")

    sub = subs.add_parser("serve", help="run the HTTP service")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=8000)
    return parser


def _merged(args: argparse.Namespace, operation: str) -> dict[str, Any]:
    """Config-file values overridden by explicitly passed flags."""
    merged: dict[str, Any] = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config, operation))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _require(merged: dict[str, Any], keys: Sequence[str], operation: str) -> None:
    missing = [k for k in keys if k not in merged]
    if missing:
        raise CliError(operation, f"missing required option(s): {', '.join('--' + k for k in missing)}")


def _params_payload(merged: dict[str, Any], operation: str, default_c: str = "inf") -> dict[str, Any]:
    _require(merged, ("m", "mu", "q", "p"), operation)
    payload = {
        "m": merged["m"],
        "mu": merged["mu"],
        "q": merged["q"],
        "c": _wire_c(merged.get("c", default_c)),
        "p": merged["p"],
    }
    params = Params(
        m=payload["m"],
        mu=payload["mu"],
        q=payload["q"],
        c=math.inf if payload["c"] == "inf" else payload["c"],
        p=payload["p"],
    )
    adm = admissible(params)
    if not adm.ok:
        raise CliError(operation, "; ".join(adm.failures))
    return payload


def _grid_payload(merged: dict[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if "n" in merged:
        out["n"] = merged["n"]
    if "r_max" in merged:
        out["r_max"] = merged["r_max"]
    return out


def _solver_payload(merged: dict[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if "tol_grad" in merged:
        out["tol_grad"] = merged["tol_grad"]
    if "max_iter" in merged:
        out["max_iter"] = merged["max_iter"]
    return out


def _out_dir(merged: dict[str, Any]) -> str:
    return merged.get("out") or os.environ.get("SOLITON_OUT_DIR") or "."


def _client(args: argparse.Namespace) -> httpx.Client:
    server = getattr(args, "server", None)
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    # default: drive the service in-process through a synchronous ASGI
    # transport, so the CLI works without a running server
    import warnings

    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*httpx.*")
        from starlette.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), base_url="http://solwave.internal")


def _post(client: httpx.Client, operation: str, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail")
        except Exception:  # noqa: BLE001
            detail = resp.text
        if isinstance(detail, dict):
            raise CliError(detail.get("operation", operation), detail.get("message", str(detail)))
        raise CliError(operation, str(detail))
    return resp.json()


def _write_tables(
    merged: dict[str, Any],
    base_name: str,
    json_doc: dict[str, Any],
    csv_specs: list[tuple[str, list[str], list[list[Any]]]],
) -> list[str]:
    from .serialization import write_csv, write_json

    fmt = merged.get("format", "both")
    out_dir = _out_dir(merged)
    written = []
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, f"{base_name}.json")
        write_json(path, json_doc)
        written.append(path)
    if fmt in ("csv", "both"):
        for suffix, header, rows in csv_specs:
            path = os.path.join(out_dir, f"{base_name}{suffix}.csv")
            write_csv(path, header, rows)
            written.append(path)
    return written


def _run_solve(args: argparse.Namespace, client: httpx.Client) -> int:
    op = args.command
    merged = _merged(args, op)
    payload_params = _params_payload(merged, op)
    if op == "solve-nmkg" and payload_params["c"] == "inf":
        raise CliError(op, "solve-nmkg requires a finite --c (use solve-nsp for c = inf)")
    if op in ("solve-nls", "solve-nsp") and payload_params["c"] != "inf":
        payload_params = dict(payload_params, c="inf")
    body: dict[str, Any] = {"params": payload_params}
    if _grid_payload(merged):
        body["grid"] = _grid_payload(merged)
    if _solver_payload(merged):
        body["solver"] = _solver_payload(merged)
    if hasattr(args, "method"):
        body["method"] = args.method
    if hasattr(args, "branch"):
        body["branch"] = args.branch
    route = {"solve-nls": "/solve/nls", "solve-nsp": "/solve/nsp", "solve-nmkg": "/solve/nmkg"}[op]
    result = _post(client, op, route, body)

    from .serialization import write_json

    out_path = os.path.join(_out_dir(merged), f"{op}.json")
    write_json(out_path, result["document"])
    energy = result["document"]["energy"]
    print(f"{op}: wrote {out_path}")
    print(
        f"  action={energy['action']:.10g} nehari={energy['nehari']:.3e} "
        f"pohozaev={energy['pohozaev']:.3e} gradient_norm={energy['gradient_norm']:.3e}"
    )
    if result.get("truncated"):
        print(f"  branch truncated (reached c = {result.get('achieved_c')})", file=sys.stderr)
        return 2
    return 0


def _run_limit_study(args: argparse.Namespace, client: httpx.Client) -> int:
    op = "limit-study"
    merged = _merged(args, op)
    _require(merged, ("c_list",), op)
    params = _params_payload(merged, op)
    c_list = _parse_float_list(str(merged["c_list"]), op, "c_list")
    body = {"params": dict(params, c="inf"), "c_list": c_list}
    if _grid_payload(merged):
        body["grid"] = _grid_payload(merged)
    if _solver_payload(merged):
        body["solver"] = _solver_payload(merged)
    result = _post(client, op, "/studies/limit", body)
    rows = [
        [r["c"], r["energy"], r["energy_gap"], r["h1_gap"], r["h2_gap"]] for r in result["rows"]
    ]
    written = _write_tables(
        merged,
        "limit-study",
        result,
        [("", ["c", "energy", "energy_gap", "h1_gap", "h2_proxy_gap"], rows)],
    )
    print(f"{op}: E_infinity = {result['e_infinity']:.10g}, fitted order = {result['fitted_order']}")
    for path in written:
        print(f"  wrote {path}")
    return 2 if result["truncated"] else 0


def _run_two_branch(args: argparse.Namespace, client: httpx.Client) -> int:
    op = "two-branch-study"
    merged = _merged(args, op)
    _require(merged, ("c_list", "q_list"), op)
    params = _params_payload(merged, op)
    body = {
        "params": dict(params, c="inf"),
        "c_list": _parse_float_list(str(merged["c_list"]), op, "c_list"),
        "q_list": _parse_float_list(str(merged["q_list"]), op, "q_list"),
        "jobs": getattr(args, "jobs", 1) or 1,
    }
    if _grid_payload(merged):
        body["grid"] = _grid_payload(merged)
    if _solver_payload(merged):
        body["solver"] = _solver_payload(merged)
    result = _post(client, op, "/studies/two-branch", body)

    branch_rows: list[list[Any]] = []
    distinct_rows: list[list[Any]] = []
    for cell in result["cells"]:
        for label, table in (("perturbative", cell["perturbative"]), ("global_min", cell["global_min"])):
            if table is None:
                continue
            for c, gap, energy in table["rows"]:
                branch_rows.append([cell["q"], label, c, gap, energy])
        for c, dist, threshold in cell["distinctness"]:
            distinct_rows.append([cell["q"], c, dist, threshold])
    written = _write_tables(
        merged,
        "two-branch-study",
        result,
        [
            ("", ["q", "branch", "c", "h1_gap_to_limit", "energy"], branch_rows),
            ("-distinctness", ["q", "c", "h1_distance", "threshold"], distinct_rows),
        ],
    )
    for cell in result["cells"]:
        status = cell["collapse"] or "both branches ok"
        print(f"  q={cell['q']}: {status}")
    for path in written:
        print(f"  wrote {path}")
    return 2 if result["truncated"] else 0


def _run_regime(args: argparse.Namespace, client: httpx.Client) -> int:
    op = "regime-report"
    merged = _merged(args, op)
    params = _params_payload(merged, op)
    if params["c"] == "inf":
        raise CliError(op, "regime-report requires a finite --c")
    result = _post(client, op, "/report/regime", {"params": params})
    print(f"regime report at p={result['p']}, omega={result['omega']:.6g}, m_bar={result['m_bar']:.6g}")
    for name, ok in result["conditions"].items():
        print(f"  {'satisfied' if ok else 'violated '}  {name}")
    print(f"  nonexistence range: {'yes' if result['nonexistent'] else 'no'}")
    written = _write_tables(merged, "regime-report", result, [])
    for path in written:
        print(f"  wrote {path}")
    return 0


def _run_nonexistence(args: argparse.Namespace, client: httpx.Client) -> int:
    op = "nonexistence-sweep"
    merged = _merged(args, op)
    params = _params_payload(merged, op)
    body: dict[str, Any] = {"params": params}
    if getattr(args, "diagnostic_flows", False):
        body["grid"] = _grid_payload(merged) or {"n": 400, "r_max": 15.0}
    result = _post(client, op, "/studies/nonexistence", body)
    for row in result["validation"]:
        mark = "accepted" if row["accepted"] else "rejected"
        print(f"  p={row['p']}: {mark} ({row['message']})")
    for diag in result["diagnostics"]:
        print(f"  flow p={diag['p']}: {diag['outcome']} (iters={diag['iterations']})")
    written = _write_tables(merged, "nonexistence-sweep", result, [])
    for path in written:
        print(f"  wrote {path}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    try:
        with _client(args) as client:
            if args.command in SOLVE_COMMANDS:
                return _run_solve(args, client)
            if args.command == "limit-study":
                return _run_limit_study(args, client)
            if args.command == "two-branch-study":
                return _run_two_branch(args, client)
            if args.command == "regime-report":
                return _run_regime(args, client)
            if args.command == "nonexistence-sweep":
                return _run_nonexistence(args, client)
            raise CliError(args.command, "unknown command")
    except CliError as exc:
        print(f"error in {exc.operation}: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error in {args.command}: transport failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
