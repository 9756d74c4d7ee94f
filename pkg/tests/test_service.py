"""HTTP service surface: endpoints, status codes, payload shapes."""

import pytest
from fastapi.testclient import TestClient

from einwarp.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_scenarios_listing(client):
    resp = client.get("/scenarios")
    assert resp.status_code == 200
    entries = resp.json()
    ids = [e["id"] for e in entries]
    assert "gs-metric" in ids and "spheres-product" in ids
    gs = next(e for e in entries if e["id"] == "gs-metric")
    assert gs["parameters"]["n"] == 5


def test_run_returns_report(client):
    resp = client.post("/scenarios/warped-representation/run",
                       json={"samples": 6})
    assert resp.status_code == 200
    report = resp.json()
    assert report["scenario_id"] == "warped-representation"
    assert report["overall_passed"] is True
    assert {"check_id", "max_residual", "mean_residual", "estimated_constant",
            "tolerance", "passed", "samples_used"} == set(report["checks"][0])
    assert report["engine_config"]["samples"] == 6


def test_run_with_overrides(client):
    resp = client.post("/scenarios/spheres-product/run",
                       json={"samples": 4, "overrides": {"rho": 2.0}})
    assert resp.status_code == 200
    report = resp.json()
    assert report["parameters"]["rho"] == 2.0
    est = next(c for c in report["checks"] if c["check_id"] == "einstein-product")
    assert abs(est["estimated_constant"] - 2.0) < 1e-3


def test_unknown_scenario_404(client):
    resp = client.post("/scenarios/nope/run", json={})
    assert resp.status_code == 404


def test_invalid_parameter_422(client):
    resp = client.post("/scenarios/gs-metric/run",
                       json={"overrides": {"c": 1.0}})
    assert resp.status_code == 422
    assert "c" in resp.json()["detail"]

    resp = client.post("/scenarios/gs-metric/run",
                       json={"overrides": {"bogus": 1.0}})
    assert resp.status_code == 422


def test_bad_engine_config_422(client):
    resp = client.post("/scenarios/cylinder/run", json={"fd_order": 3})
    assert resp.status_code == 422


def test_samples_endpoint_returns_csv(client):
    resp = client.post("/scenarios/cylinder/samples", json={"samples": 5})
    assert resp.status_code == 200
    lines = resp.text.strip().splitlines()
    assert len(lines) == 6
    assert "isometry-cylinder" in lines[0]
