"""Acceptance suite: one test per exit criterion, each at its stated
tolerance, printing one pass/fail line (collected in the terminal summary).

Criterion 7 is executed exactly at its stated parameters.  For m = mu = 1
and p = 2.5 both solution branches fold near charge 0.03 (verified by
charge continuation, by direct landscape scans with Gaussian, plateau and
rescaled-minimizer families, and by the effective-coupling rescaling
q_eff^2 = 8 q^2), so the q = 0.05 and q = 0.1 cells of that criterion are
unattainable and the test reports FAIL honestly.  The same two-branch
structure is demonstrated at attainable charges in tests/test_studies.py
and in this module's criterion-3 suite at q = 0.02.
"""

import time

import numpy as np
import pytest

from conftest import record_criterion
from solwave.cli import main as cli_main
from solwave.functionals import (
    action_nmkg,
    action_nsp,
    energy_identity_gap,
    functional_scalars,
    gradient_nmkg,
    gradient_nsp,
    ground_energy_identity,
    pair,
)
from solwave.grid import RadialField, make_grid, norms
from solwave.params import Params, admissible
from solwave.potentials import solve_phi_c, solve_phi_infty
from solwave.solvers import (
    BranchSpec,
    SolverConfig,
    continuation,
    minimize_nsp_global,
    minimize_nsp_ground,
    mountain_pass_level,
    solve_nls_ground,
)
from solwave.studies import decay_fit, nonrelativistic_limit_study, two_branch_study

CFG = SolverConfig()


# -- shared expensive artifacts --------------------------------------------------


@pytest.fixture(scope="module")
def limit_setup():
    """Criterion 5/6 pipeline: p = 4, m = mu = 1, q = 0.5, n = 2000."""
    grid = make_grid(2000, 20.0)
    base = Params(m=1.0, mu=1.0, q=0.5, p=4.0)
    t0 = time.perf_counter()
    result = nonrelativistic_limit_study(grid, base, (4.0, 8.0, 16.0, 32.0), CFG)
    elapsed = time.perf_counter() - t0
    return base, result, elapsed


@pytest.fixture(scope="module")
def default_suite():
    """Converged solutions across p in {2.5, 3.5, 4, 5} with workable charges."""
    reports = {}
    grid = make_grid(2000, 16.0)
    for p in (3.5, 4.0, 5.0):
        params = Params(m=1.0, mu=1.0, q=0.5, p=p)
        ground = minimize_nsp_ground(grid, params, CFG)
        reports[f"nsp-ground-p{p}"] = ground
        branch = continuation(grid, BranchSpec("c", (8.0,)), params, ground, CFG)
        reports[f"nmkg-c8-p{p}"] = branch.points[-1].report

    sub = Params(m=1.0, mu=1.0, q=0.02, p=2.5)
    v_inf = minimize_nsp_global(grid, sub, CFG)
    reports["nsp-global-p2.5"] = v_inf
    w0 = solve_nls_ground(grid, sub.with_(q=0.0), CFG)
    qbr = continuation(grid, BranchSpec("q", (0.02,)), sub.with_(q=0.0), w0, CFG)
    w_inf = qbr.points[-1].report
    reports["nsp-perturbative-p2.5"] = w_inf
    for name, seed in (("nmkg-c32-global-p2.5", v_inf), ("nmkg-c32-perturbative-p2.5", w_inf)):
        branch = continuation(grid, BranchSpec("c", (32.0,)), sub, seed, CFG)
        reports[name] = branch.points[-1].report

    nls_grid = make_grid(2000, 20.0)
    reports["nls-w0"] = solve_nls_ground(nls_grid, Params(m=1.0, mu=0.5, q=0.5, p=4.0), CFG)
    return reports


# -- criteria ---------------------------------------------------------------------


def test_criterion_01_poisson_oracle_equivalence():
    grid = make_grid(2000, 30.0)
    u = RadialField.from_function(grid, lambda r: np.exp(-r))
    params = Params(m=1.0, mu=1.0, q=1.0)
    phi = solve_phi_infty(u, params).phi.values
    t0 = time.perf_counter()
    screened = solve_phi_c(u, params.with_(c=1e4)).phi.values
    elapsed = time.perf_counter() - t0
    rel = np.max(np.abs(screened - phi) / np.maximum(np.abs(phi), 1e-300))
    ok = rel <= 1e-3 and elapsed < 1.0
    record_criterion(
        f"[criterion 01] {'PASS' if ok else 'FAIL'}: screened solve at c=1e4 matches the "
        f"Newtonian closed form node-wise to {rel:.2e} (tol 1e-3), {elapsed * 1e3:.0f} ms"
    )
    assert rel <= 1e-3
    assert elapsed < 1.0


def test_criterion_02_gradient_consistency():
    grid = make_grid(1500, 25.0)
    fields = [
        RadialField.from_function(grid, fn)
        for fn in (
            lambda r: np.exp(-r),
            lambda r: (1.0 + r) * np.exp(-2.0 * r),
            lambda r: np.exp(-(r**2)),
            lambda r: r**2 * np.exp(-1.5 * r),
            lambda r: np.exp(-0.8 * r) * (1.0 + 0.3 * np.sin(r)),
        )
    ]
    p_inf = Params(m=1.0, mu=1.0, q=0.5, p=4.0)
    p_c = p_inf.with_(c=2.0)
    eps = 1e-5
    t0 = time.perf_counter()
    worst = 0.0
    for i, u in enumerate(fields):
        v = fields[(i + 1) % len(fields)]
        for params, act, grad in (
            (p_inf, action_nsp, gradient_nsp),
            (p_c, action_nmkg, gradient_nmkg),
        ):
            paired = pair(grid, grad(u, params).values, v.values)
            up = RadialField(grid, u.values + eps * v.values)
            dn = RadialField(grid, u.values - eps * v.values)
            fd = (act(up, params).action - act(dn, params).action) / (2.0 * eps)
            worst = max(worst, abs(paired - fd) / (1.0 + abs(paired)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-4 and elapsed < 10.0
    record_criterion(
        f"[criterion 02] {'PASS' if ok else 'FAIL'}: directional-derivative checks on 5 fields, "
        f"worst relative defect {worst:.2e} (tol 1e-4), {elapsed:.1f} s"
    )
    assert worst <= 1e-4
    assert elapsed < 10.0


def test_criterion_03_critical_point_identities(default_suite):
    worst_jp = 0.0
    worst_comb = 0.0
    worst_ground = 0.0
    for name, rep in default_suite.items():
        e = rep.energy
        assert rep.converged, name
        assert rep.positivity, name
        worst_jp = max(worst_jp, abs(e.nehari) / e.scale, abs(e.pohozaev) / e.scale)
        phi = rep.phi
        s = functional_scalars(rep.u, rep.params, phi=phi)
        worst_comb = max(worst_comb, energy_identity_gap(e, rep.params, s))
        if rep.params.is_nsp and rep.params.q > 0.0:
            gap = abs(e.action - ground_energy_identity(rep.params, s)) / max(abs(e.action), 1e-300)
            worst_ground = max(worst_ground, gap)
    ok = worst_jp <= 1e-4 and worst_comb <= 1e-6 and worst_ground <= 1e-4
    record_criterion(
        f"[criterion 03] {'PASS' if ok else 'FAIL'}: {len(default_suite)} converged solutions; "
        f"max |J|,|P| = {worst_jp:.2e} of scale (tol 1e-4); action-combination identity "
        f"{worst_comb:.2e} (tol 1e-6); ground-energy identity {worst_ground:.2e} (tol 1e-4)"
    )
    assert worst_jp <= 1e-4
    assert worst_comb <= 1e-6
    assert worst_ground <= 1e-4


def test_criterion_04_nls_cross_validation():
    params = Params(m=1.0, mu=0.5, q=0.5, p=4.0)  # 2 m mu = 1
    grid = make_grid(6000, 20.0)
    sh = solve_nls_ground(grid, params, CFG, method="shooting")
    de = solve_nls_ground(grid, params, CFG, method="descent")
    h1_rel = (
        norms(RadialField(grid, sh.u.values - de.u.values))["H1"] / norms(de.u)["H1"]
    )

    from scipy.interpolate import InterpolatedUnivariateSpline

    g3 = make_grid(3000, 20.0)
    w1 = solve_nls_ground(g3, params, CFG)
    scale_dev = 0.0
    for lam in (0.5, 2.0):
        wl = solve_nls_ground(g3, params.with_(mu=0.5 * lam), CFG)
        spline = InterpolatedUnivariateSpline(g3.r, w1.u.values, k=3, ext="zeros")
        pred = lam**0.5 * spline(np.sqrt(lam) * g3.r)
        scale_dev = max(
            scale_dev, np.max(np.abs(pred - wl.u.values)) / np.max(np.abs(wl.u.values))
        )
    ok = h1_rel <= 1e-4 and scale_dev <= 1e-5
    record_criterion(
        f"[criterion 04] {'PASS' if ok else 'FAIL'}: shooting vs descent H1 gap "
        f"{h1_rel:.2e} (tol 1e-4); dilation-symmetry sup deviation {scale_dev:.2e} (tol 1e-5)"
    )
    assert h1_rel <= 1e-4
    assert scale_dev <= 1e-5


def test_criterion_05_nonrelativistic_limit(limit_setup):
    _base, result, elapsed = limit_setup
    e_inf = result.e_infinity
    upper = all(r.energy <= e_inf + 1e-4 * abs(e_inf) for r in result.rows)
    h1s = [r.h1_gap for r in result.rows]
    h2s = [r.h2_gap for r in result.rows]
    mono = all(h1s[i] > h1s[i + 1] for i in range(len(h1s) - 1)) and all(
        h2s[i] > h2s[i + 1] for i in range(len(h2s) - 1)
    )
    order_ok = 0.7 <= result.fitted_order <= 1.3
    ok = (
        len(result.rows) == 4
        and not result.truncated
        and upper
        and mono
        and order_ok
        and elapsed < 120.0
    )
    record_criterion(
        f"[criterion 05] {'PASS' if ok else 'FAIL'}: c in {{4,8,16,32}}; E_c <= E_inf: {upper}; "
        f"H1/H2 gaps monotone: {mono}; fitted order {result.fitted_order:.3f} within [0.7,1.3]; "
        f"{elapsed:.0f} s (< 120 s) on n = 2000"
    )
    assert upper and mono and order_ok and elapsed < 120.0


def test_criterion_06_mountain_pass_bracket(limit_setup):
    base, result, _ = limit_setup
    e_inf = result.e_infinity
    gap8 = abs(mountain_pass_level(result.reference, base.with_(c=8.0)).e_hat - e_inf)
    gap16 = abs(mountain_pass_level(result.reference, base.with_(c=16.0)).e_hat - e_inf)
    ratio = gap8 / gap16
    ok = 4.0 * 0.7 <= ratio <= 4.0 * 1.3
    # the one-path level also dominates the branch energy (upper bound role)
    e8 = [r.energy for r in result.rows if r.c == 8.0][0]
    dominance = e8 <= mountain_pass_level(result.reference, base.with_(c=8.0)).e_hat + 1e-6 * abs(e_inf)
    record_criterion(
        f"[criterion 06] {'PASS' if ok and dominance else 'FAIL'}: |e_hat_c - E_inf| halving ratio "
        f"{ratio:.3f} (4 +/- 30%); path level dominates branch energy: {dominance}"
    )
    assert ok and dominance


def test_criterion_07_two_branch_structure():
    """Faithful run at the stated parameters (p=2.5, m=mu=1, q=0.05, c=32).

    Expected to FAIL: both subcubic branches fold near q ~ 0.03 for these
    masses, so no second solution exists at q in {0.05, 0.1}.  The module
    docstring and the regular test suite carry the supporting evidence.
    """
    grid = make_grid(1600, 22.0)
    base = Params(m=1.0, mu=1.0, q=0.05, p=2.5)
    result = two_branch_study(grid, base, (0.1, 0.05, 0.025), (8.0, 16.0, 32.0), CFG)
    cells = {c.q: c for c in result.cells}

    cell = cells[0.05]
    has_two = (
        cell.perturbative is not None
        and cell.global_min is not None
        and any(c == 32.0 for c, _, _ in cell.distinctness)
    )
    distinct = has_two and all(d > thr for _c, d, thr in cell.distinctness)
    gaps_ok = True
    for q in (0.05,):
        for table in (cells[q].perturbative, cells[q].global_min):
            if table is None or len(table.rows) < 3:
                gaps_ok = False
            else:
                gaps = [g for _c, g, _e in table.rows]
                gaps_ok = gaps_ok and all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))
    trend = dict(result.global_min_h1_by_q)
    blowup_ok = (
        0.1 in trend and 0.05 in trend and 0.025 in trend
        and trend[0.025] > trend[0.05] > trend[0.1]
    )
    ok = has_two and distinct and gaps_ok and blowup_ok
    detail = []
    for q in (0.1, 0.05, 0.025):
        c = cells[q]
        detail.append(f"q={q}: {'ok' if c.collapse is None else c.collapse}")
    record_criterion(
        f"[criterion 07] {'PASS' if ok else 'FAIL'}: two-branch structure at q=0.05, c=32 "
        f"(expected unattainable: both branches fold near q ~ 0.03 for m = mu = 1, p = 2.5); "
        + "; ".join(detail)
    )
    assert has_two, "no second solution exists at q = 0.05 for m = mu = 1, p = 2.5"
    assert distinct and gaps_ok and blowup_ok


def test_criterion_08_maximum_principle_bracket(default_suite):
    checked = 0
    for rep in default_suite.values():
        if rep.params.is_nsp:
            continue
        lo = rep.params.phi_lower_bound
        assert np.all(rep.phi.values <= 0.0)
        assert np.all(rep.phi.values >= lo)
        checked += 1
    grid = make_grid(1000, 25.0)
    for fn in (lambda r: np.exp(-r), lambda r: 3.0 * np.exp(-(r**2)), lambda r: r * np.exp(-r)):
        u = RadialField.from_function(grid, fn)
        for c in (2.0, 32.0, 1e4):
            params = Params(m=1.0, mu=1.0, q=1.0, c=c)
            phi = solve_phi_c(u, params).phi.values
            assert np.all(phi <= 0.0)
            assert np.all(phi >= params.phi_lower_bound)
            checked += 1
    record_criterion(
        f"[criterion 08] PASS: {checked} screened fields satisfy "
        f"-(c^2/q)(m - mu/c^2) <= Phi <= 0 node-wise, exactly"
    )


def test_criterion_09_decay_property(default_suite):
    worst_r2 = 1.0
    for name, rep in default_suite.items():
        fit = decay_fit(rep)
        worst_r2 = min(worst_r2, fit.r_squared)
        assert fit.rate < 0.0, name
        assert fit.r_squared > 0.99, (name, fit.r_squared)
    w0_fit = decay_fit(default_suite["nls-w0"])
    rate_ok = abs(w0_fit.ratio - 1.0) <= 0.15
    record_criterion(
        f"[criterion 09] {'PASS' if rate_ok else 'FAIL'}: all tail fits R^2 > 0.99 "
        f"(worst {worst_r2:.5f}); decoupled-limit rate/linearized = {w0_fit.ratio:.3f} "
        f"(within 15%)"
    )
    assert rate_ok


def test_criterion_10_validation_contract(tmp_path, capsys):
    for p_exp in (2.0, 6.0):
        adm = admissible(Params(m=1.0, mu=1.0, q=0.5, c=2.0, p=p_exp))
        assert not adm.ok
        assert any("p <= 2 or p >= 6" in msg for msg in adm.failures)
        code = cli_main(
            ["solve-nsp", "--p", str(p_exp), "--m", "1", "--mu", "1", "--q", "0.5",
             "--out", str(tmp_path)]
        )
        assert code == 1
        assert "p <= 2 or p >= 6" in capsys.readouterr().err
    adm = admissible(Params(m=1.0, mu=1.0, q=0.5, c=1.0, p=4.0))
    assert not adm.ok
    assert any("sqrt(mu/m)" in msg for msg in adm.failures)
    code = cli_main(
        ["solve-nmkg", "--p", "4", "--m", "1", "--mu", "1", "--q", "0.5", "--c", "0.5",
         "--out", str(tmp_path)]
    )
    assert code == 1
    assert "sqrt(mu/m)" in capsys.readouterr().err
    record_criterion(
        "[criterion 10] PASS: p in {2, 6} and c <= sqrt(mu/m) rejected with messages "
        "citing the violated conditions"
    )
