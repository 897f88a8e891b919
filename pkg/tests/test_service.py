import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.filterwarnings("ignore", message=".*httpx.*")
    from starlette.testclient import TestClient

from solwave.serialization import solution_from_document
from solwave.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


SMALL_BODY = {
    "params": {"m": 1.0, "mu": 0.5, "q": 0.5, "c": "inf", "p": 4.0},
    "grid": {"n": 400, "r_max": 14.0},
}


class TestServiceEndpoints:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_admissibility_report(self, client):
        resp = client.post(
            "/report/admissibility",
            json={"params": {"m": 1.0, "mu": 1.0, "q": 1.0, "c": 0.5, "p": 4.0}},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["ok"] is False
        assert any("sqrt(mu/m)" in f for f in body["failures"])

    def test_regime_endpoint(self, client):
        resp = client.post(
            "/report/regime",
            json={"params": {"m": 1.0, "mu": 1.0, "q": 0.1, "c": 2.0, "p": 2.5}},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["omega"] == pytest.approx(1.5)
        assert body["conditions"]["azzollini_pisani_pomponio"] is True

    def test_solve_nls_returns_document(self, client):
        resp = client.post("/solve/nls", json=SMALL_BODY)
        assert resp.status_code == 200
        doc = resp.json()["document"]
        rep = solution_from_document(doc)
        assert rep.converged
        assert rep.u.values[0] == pytest.approx(4.337, abs=0.02)

    def test_solve_rejects_inadmissible(self, client):
        bad = {"params": dict(SMALL_BODY["params"], p=6.0)}
        resp = client.post("/solve/nsp", json=bad)
        assert resp.status_code == 400
        detail = resp.json()["detail"]
        assert detail["operation"] == "solve-nsp"
        assert "p <= 2 or p >= 6" in detail["message"]

    def test_solve_nmkg_requires_finite_c(self, client):
        resp = client.post("/solve/nmkg", json=SMALL_BODY)
        assert resp.status_code == 400
        assert "finite c" in resp.json()["detail"]["message"]

    def test_solve_nmkg_round_trip(self, client):
        body = dict(SMALL_BODY, params=dict(SMALL_BODY["params"], c=16.0))
        resp = client.post("/solve/nmkg", json=body)
        assert resp.status_code == 200
        payload = resp.json()
        assert payload["truncated"] is False
        assert payload["achieved_c"] == 16.0
        rep = solution_from_document(payload["document"])
        assert rep.params.c == 16.0
        assert rep.converged
        # screened potential respects the maximum-principle bracket exactly
        assert np.all(rep.phi.values <= 0.0)
        assert np.all(rep.phi.values >= rep.params.phi_lower_bound)

    def test_validation_error_is_422(self, client):
        resp = client.post("/solve/nls", json={"params": {"m": -1.0}})
        assert resp.status_code == 422

    def test_nonexistence_endpoint(self, client):
        resp = client.post(
            "/studies/nonexistence",
            json={"params": {"m": 1.0, "mu": 1.0, "q": 0.5, "c": "inf", "p": 4.0}},
        )
        assert resp.status_code == 200
        rows = {row["p"]: row["accepted"] for row in resp.json()["validation"]}
        assert rows[6.0] is False and rows[4.0] is True
