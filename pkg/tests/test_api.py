# tests/test_api.py - Tests for the FastAPI routes and error handlers
import asyncio
import sys
import os

# Add project root to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from api.routes import analysis_api, simulation_api
from errors import ConfigurationError
from main import app
from models.schemas import GameSpec, SimulateRequest

client = TestClient(app)

MATCHING = {"payoff": [[0, 1], [1, 0]], "sigma": [1, 1]}


def test_health():
    print("🧪 Testing /health...")

    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"
    print("   ✅ Health passed")


def test_classify_route():
    print("🧪 Testing /api/classify...")

    response = client.post("/api/classify", json=MATCHING)
    assert response.status_code == 200
    body = response.json()
    assert body["label"] == "PositiveRecurrent"
    assert body["certificate"]["rule"] == "dirichlet_invariant_law"
    assert body["vertex_stability"]["1"]["verdict"] == "NotNash_Unstable"
    print("   ✅ Classify route passed")


def test_analyze_route_direct():
    """Call the route coroutine directly, without HTTP."""
    print("🧪 Testing analyze_game coroutine...")

    report = asyncio.run(analysis_api.analyze_game(GameSpec(**MATCHING)))
    assert report["interior_nash"] == pytest.approx([0.5, 0.5])
    assert report["dirichlet"]["alpha"] == pytest.approx([1.0, 1.0])
    assert report["pure_nash"] == []
    print("   ✅ analyze_game passed")


def test_invalid_game_is_422():
    print("🧪 Testing invalid games...")

    response = client.post("/api/analyze", json={"payoff": [[0, 1], [1, 0]], "sigma": [1, -1]})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] is True
    assert body["error_code"] == "invalid_game"
    assert "sigma_i > 0" in body["detail"]

    response = client.post("/api/classify", json={"payoff": [[0, 1], [1, 0]]})
    assert response.status_code == 422
    assert response.json()["error_code"] == "invalid_game"

    response = client.post("/api/classify?tol_scale=0", json=MATCHING)
    assert response.status_code == 422

    response = client.post("/api/classify", json={"payoff": [[0, 1], [1]], "sigma": [1, 1]})
    assert response.status_code == 422
    assert "payoff is square with side n" in response.json()["detail"]
    print("   ✅ Invalid games passed")


def test_simulate_route():
    print("🧪 Testing /api/simulate...")

    response = client.post("/api/simulate", json={"game": MATCHING, "t_final": 1.0, "dt": 0.001, "seed": 4})
    assert response.status_code == 200
    body = response.json()
    assert body["points"] == 1001
    assert body["config"]["seed"] == 4
    assert abs(sum(body["time_average"]) - 1.0) < 1e-12
    assert len(body["hannan_residuals"]) == 2

    again = client.post("/api/simulate", json={"game": MATCHING, "t_final": 1.0, "dt": 0.001, "seed": 4})
    assert again.json()["time_average"] == body["time_average"]
    print("   ✅ Simulate route passed")


def test_simulate_step_limit():
    print("🧪 Testing the API step limit...")

    with patch.object(simulation_api, "API_MAX_STEPS", 10):
        request = SimulateRequest(game=GameSpec(**MATCHING), t_final=1.0, dt=0.01)
        with pytest.raises(ConfigurationError):
            simulation_api.run_simulation(request)

        response = client.post("/api/simulate", json={"game": MATCHING, "t_final": 1.0, "dt": 0.01})
        assert response.status_code == 422
        assert response.json()["error_code"] == "invalid_config"
    print("   ✅ Step limit passed")


def test_schemas():
    print("🧪 Testing schema routes...")

    names = client.get("/api/schemas").json()["schemas"]
    assert "classification" in names and "manifest" in names
    schema = client.get("/api/schemas/classification").json()
    assert "label" in schema["properties"]
    assert client.get("/api/schemas/nothing").status_code == 404
    print("   ✅ Schema routes passed")


def run_all_tests():
    """Run all API tests."""
    print("\n" + "=" * 60)
    print("🧪 API TESTS")
    print("=" * 60 + "\n")

    test_health()
    test_classify_route()
    test_analyze_route_direct()
    test_invalid_game_is_422()
    test_simulate_route()
    test_simulate_step_limit()
    test_schemas()

    print("\n" + "=" * 60)
    print("🎉 ALL API TESTS PASSED!")
    print("=" * 60 + "\n")


if __name__ == "__main__":
    run_all_tests()
