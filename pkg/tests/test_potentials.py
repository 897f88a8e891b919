import numpy as np
import pytest
from scipy.interpolate import InterpolatedUnivariateSpline

from solwave.errors import FieldSolveError
from solwave.grid import RadialField, make_grid, norms, rescale_field
from solwave.params import Params
from solwave.potentials import (
    newtonian_potential_values,
    screened_minus_newtonian_gap,
    solve_phi_c,
    solve_phi_infty,
)


@pytest.fixture(scope="module")
def grid():
    return make_grid(2000, 30.0)


@pytest.fixture(scope="module")
def u_exp(grid):
    return RadialField.from_function(grid, lambda r: np.exp(-r))


PARAMS_INF = Params(m=1.0, mu=1.0, q=1.0)


class TestGreenOperator:
    def test_self_adjoint_in_volume_inner_product(self, grid):
        rng = np.random.default_rng(7)
        a = rng.standard_normal(grid.n + 1)
        b = rng.standard_normal(grid.n + 1)
        na = newtonian_potential_values(grid, a)
        nb = newtonian_potential_values(grid, b)
        lhs = np.dot(grid.weights, na * b)
        rhs = np.dot(grid.weights, a * nb)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_inverts_laplacian(self, grid):
        # -lap G[f] = f for a smooth compact-ish source, away from boundaries
        from solwave.grid import laplacian_values

        f = np.exp(-((grid.r - 3.0) ** 2))
        phi = newtonian_potential_values(grid, f)
        lap = laplacian_values(grid, phi)
        inner = slice(1, grid.n // 2)
        assert np.max(np.abs(lap[inner] + f[inner])) < 5e-4


class TestNewtonianPotential:
    def test_zero_source(self, grid):
        res = solve_phi_infty(RadialField.zero(grid), PARAMS_INF)
        assert np.all(res.phi.values == 0.0)
        assert res.charge == 0.0

    def test_center_value_oracle(self, grid, u_exp):
        res = solve_phi_infty(u_exp, PARAMS_INF)
        # phi(0) = -int_0^inf s e^{-2s} ds = -1/4
        assert res.phi.values[0] == pytest.approx(-0.25, abs=1e-4)

    def test_far_field_oracle(self, grid, u_exp):
        res = solve_phi_infty(u_exp, PARAMS_INF)
        j = int(round(20.0 / grid.h))
        # r phi(r) -> -int_0^inf s^2 e^{-2s} ds = -1/4
        assert grid.r[j] * res.phi.values[j] == pytest.approx(-0.25, abs=1e-3)

    def test_sign_and_monopole_bracket(self, grid, u_exp):
        res = solve_phi_infty(u_exp, PARAMS_INF)
        phi = res.phi.values
        assert np.all(phi <= 0.0)
        floor = -res.charge / (4.0 * np.pi * grid.r[1:])
        assert np.all(phi[1:] >= floor - 1e-13)

    def test_charge(self, grid, u_exp):
        res = solve_phi_infty(u_exp, PARAMS_INF)
        assert res.charge == pytest.approx(np.pi, rel=1e-7)


class TestScreenedPotential:
    def test_zero_source(self, grid):
        res = solve_phi_c(RadialField.zero(grid), Params(m=1.0, mu=1.0, q=1.0, c=2.0))
        assert np.all(res.phi.values == 0.0)

    def test_requires_finite_c(self, grid, u_exp):
        with pytest.raises(FieldSolveError):
            solve_phi_c(u_exp, PARAMS_INF)

    def test_large_c_matches_newtonian(self, grid, u_exp):
        phi = solve_phi_infty(u_exp, PARAMS_INF).phi.values
        Phi = solve_phi_c(u_exp, Params(m=1.0, mu=1.0, q=1.0, c=1e3)).phi.values
        assert np.max(np.abs(Phi - phi)) <= 1e-3 * np.max(np.abs(phi))

    def test_maximum_principle_bracket_exact(self, grid, u_exp):
        params = Params(m=1.0, mu=1.0, q=1.0, c=2.0)
        res = solve_phi_c(u_exp, params)
        # -(c^2/q)(m - mu/c^2) = -(c^2 m - mu)/q = -3 here
        assert params.phi_lower_bound == pytest.approx(-3.0)
        assert np.all(res.phi.values <= 0.0)
        assert np.all(res.phi.values >= params.phi_lower_bound)

    def test_residual_below_tolerance(self, grid, u_exp):
        res = solve_phi_c(u_exp, Params(m=1.0, mu=1.0, q=1.0, c=2.0))
        assert res.residual <= 1e-10

    def test_gap_scales_as_inverse_c_squared(self, grid, u_exp):
        for c in (2.0, 4.0, 8.0):
            g1 = screened_minus_newtonian_gap(u_exp, Params(m=1.0, mu=1.0, q=1.0, c=c))
            g2 = screened_minus_newtonian_gap(u_exp, Params(m=1.0, mu=1.0, q=1.0, c=2.0 * c))
            assert g1 / g2 == pytest.approx(4.0, rel=0.25)


class TestQuantitativeBounds:
    def test_potential_energy_ratio_below_one(self, grid):
        # ||phi_u||_D12 <= C q m ||u||_H1^2 with C < 1 on the test corpus
        for fn in (lambda r: np.exp(-r), lambda r: np.exp(-(r**2)), lambda r: r * np.exp(-r)):
            u = RadialField.from_function(grid, fn)
            phi = solve_phi_infty(u, PARAMS_INF).phi
            ratio = norms(phi)["D12"] / (1.0 * 1.0 * norms(u)["H1"] ** 2)
            assert 0.0 < ratio < 1.0

    def test_lipschitz_map(self, grid):
        # ||phi_v - phi_w||_D12 <= C ||v+w||_H1 ||v-w||_H1, recorded C < 1
        pairs = [
            (lambda r: np.exp(-r), lambda r: np.exp(-1.3 * r)),
            (lambda r: np.exp(-(r**2)), lambda r: 0.5 * np.exp(-r)),
            (lambda r: r * np.exp(-r), lambda r: np.exp(-2.0 * r)),
        ]
        recorded = []
        for fv, fw in pairs:
            v = RadialField.from_function(grid, fv)
            w = RadialField.from_function(grid, fw)
            dphi = RadialField(
                grid,
                solve_phi_infty(v, PARAMS_INF).phi.values
                - solve_phi_infty(w, PARAMS_INF).phi.values,
            )
            num = norms(dphi)["D12"]
            den = (
                norms(RadialField(grid, v.values + w.values))["H1"]
                * norms(RadialField(grid, v.values - w.values))["H1"]
            )
            recorded.append(num / den)
        assert max(recorded) < 1.0

    def test_dilation_covariance(self, grid, u_exp):
        # phi_{t^2 u(t.)}(r) = t^2 phi_u(t r) up to grid tolerance
        phi = solve_phi_infty(u_exp, PARAMS_INF).phi.values
        spline = InterpolatedUnivariateSpline(grid.r, phi, k=3, ext="zeros")
        for t in (0.5, 2.0):
            lhs = solve_phi_infty(rescale_field(u_exp, t), PARAMS_INF).phi.values
            rhs = t * t * spline(t * grid.r)
            window = grid.r <= grid.r_max / max(t, 1.0) * 0.999
            scale = np.max(np.abs(lhs))
            assert np.max(np.abs(lhs[window] - rhs[window])) <= 1e-3 * scale
