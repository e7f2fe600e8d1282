# tests/test_cli.py - Tests for the command-line front end, manifests and replay
import json
import sys
import os

# Add project root to sys.path
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, PROJECT_ROOT)

from unittest.mock import patch

import pytest

import cli
from errors import GameValidationError
from services.game_io import load_game
from services.manifest import manifest_path, read_manifest
from services.verification import Check, VerificationResult


def games(name: str) -> str:
    return os.path.join(PROJECT_ROOT, "data", "games", f"{name}.json")


def write_json(path, payload) -> str:
    path.write_text(json.dumps(payload))
    return str(path)


def test_analyze_writes_report_and_manifest(tmp_path):
    print("🧪 Testing analyze...")

    out = tmp_path / "analysis.json"
    assert cli.main(["analyze", games("rsp_recurrent"), "--out", str(out)]) == 0

    report = json.loads(out.read_text())
    assert report["n"] == 3
    assert report["equalizer"]["kind"] == "UniquePoint"
    assert report["dirichlet"]["density_certificate"] == "a"

    manifest = read_manifest(manifest_path(out))
    assert manifest.command == "analyze"
    assert manifest.outputs == [str(out)]
    assert manifest.game["sigma"] == [0.5, 0.5, 0.5]
    print("   ✅ Analyze passed")


def test_classify_to_stdout(capsys):
    print("🧪 Testing classify on stdout...")
    capsys.readouterr()  # drop the banner so only CLI output is parsed

    assert cli.main(["--quiet", "classify", games("dominance")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["label"] == "Transient"
    assert report["vanishing_strategies"] == [2]
    assert report["vertex_stability"]["1"]["verdict"] == "StrictNE_Stable"
    print("   ✅ Classify passed")


def test_invalid_inputs_exit_2(tmp_path):
    print("🧪 Testing invalid inputs...")

    bad_sigma = write_json(tmp_path / "bad.json", {"payoff": [[0, 1], [1, 0]], "sigma": [1, 0]})
    assert cli.main(["classify", bad_sigma]) == 2

    missing = write_json(tmp_path / "missing.json", {"payoff": [[0, 1], [1, 0]]})
    assert cli.main(["analyze", missing]) == 2

    (tmp_path / "broken.json").write_text("{not json")
    assert cli.main(["analyze", str(tmp_path / "broken.json")]) == 2

    assert cli.main(["analyze", str(tmp_path / "nowhere.json")]) == 2
    assert cli.main(["--tol-scale", "0", "analyze", games("matching")]) == 2
    assert cli.main(["simulate", games("matching"), "--t-final", "1", "--x0", "a,b"]) == 2
    assert cli.main(["simulate", games("matching"), "--t-final", "1", "--x0", "1,0"]) == 2
    assert cli.main(["simulate", games("matching"), "--t-final", "0.0001", "--dt", "0.001"]) == 2
    print("   ✅ Invalid inputs passed")


def test_ragged_payoff_exit_2(tmp_path):
    print("🧪 Testing a payoff with unequal rows...")

    ragged = write_json(tmp_path / "ragged.json", {"payoff": [[0, 1], [1]], "sigma": [1, 1]})
    assert cli.main(["classify", ragged]) == 2
    assert cli.main(["simulate", ragged, "--t-final", "1"]) == 2
    with pytest.raises(GameValidationError, match="payoff is square with side n"):
        load_game(ragged)
    print("   ✅ Ragged payoff passed")


def test_numerical_failure_exit_3(tmp_path):
    print("🧪 Testing numerical failure exit code...")

    huge = 1.7e308
    path = write_json(tmp_path / "huge.json", {"payoff": [[huge, huge], [-huge, -huge]], "sigma": [1, 1]})
    assert cli.main(["simulate", path, "--t-final", "1", "--dt", "1"]) == 3
    print("   ✅ Numerical failure passed")


def test_simulate_and_replay_bit_identical(tmp_path):
    """Replaying a manifest reproduces the trajectory and the report byte for byte."""
    print("🧪 Testing simulate and replay...")

    out = tmp_path / "run.csv"
    argv = ["simulate", games("matching"), "--t-final", "2", "--dt", "0.001", "--seed", "11", "--out", str(out)]
    assert cli.main(argv) == 0
    report_path = out.with_suffix(".json")
    assert out.exists() and report_path.exists()

    manifest = read_manifest(manifest_path(out))
    assert manifest.seeds == [11]
    assert manifest.config["burn_in"] == 0.02
    assert manifest.outputs == [str(out), str(report_path)]

    replayed = tmp_path / "again.csv"
    assert cli.main(["replay", str(manifest_path(out)), "--out", str(replayed)]) == 0
    assert replayed.read_bytes() == out.read_bytes()
    assert replayed.with_suffix(".json").read_bytes() == report_path.read_bytes()

    report = json.loads(report_path.read_text())
    assert report["dirichlet_check"] is not None
    assert abs(sum(report["time_average"]) - 1.0) < 1e-12
    print("   ✅ Simulate and replay passed")


def test_replay_rejects_bad_manifest(tmp_path):
    print("🧪 Testing bad manifests...")

    bad = write_json(tmp_path / "bad.manifest.json", {"command": "dance"})
    assert cli.main(["replay", bad]) == 2
    print("   ✅ Bad manifests passed")


def test_verify_certificate_only(tmp_path):
    """A game with no simulated checks still gets the certificate re-check."""
    print("🧪 Testing verify without simulations...")

    out = tmp_path / "verify.json"
    assert cli.main(["verify", games("constant_column"), "--out", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["label"] == "NotPositiveRecurrent"
    assert [c["name"] for c in result["checks"]] == ["certificate"]
    assert result["passed"]
    print("   ✅ Verify without simulations passed")


def test_verify_failure_exit_1(tmp_path):
    print("🧪 Testing verify failure exit code...")

    failing = VerificationResult(label="PositiveRecurrent", runs=1, t_final=1.0, seed_base=0,
                                 checks=[Check("time_average", False, 0.5, 0.02)])
    out = tmp_path / "verify.json"
    with patch.object(cli, "run_verification", return_value=failing):
        assert cli.main(["verify", games("matching"), "--out", str(out)]) == 1
    assert json.loads(out.read_text())["passed"] is False
    assert manifest_path(out).exists()
    print("   ✅ Verify failure passed")


def test_schema_command(capsys):
    print("🧪 Testing schema command...")
    capsys.readouterr()  # drop the banner so only CLI output is parsed

    assert cli.main(["schema", "game"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert "payoff" in schema["properties"]
    print("   ✅ Schema command passed")


def run_all_tests():
    """Run all CLI tests."""
    import tempfile
    from pathlib import Path

    print("\n" + "=" * 60)
    print("🧪 CLI TESTS")
    print("=" * 60 + "\n")

    for test in (
        test_analyze_writes_report_and_manifest,
        test_invalid_inputs_exit_2,
        test_ragged_payoff_exit_2,
        test_numerical_failure_exit_3,
        test_simulate_and_replay_bit_identical,
        test_replay_rejects_bad_manifest,
        test_verify_certificate_only,
        test_verify_failure_exit_1,
    ):
        with tempfile.TemporaryDirectory() as tmp:
            test(Path(tmp))

    print("\n" + "=" * 60)
    print("🎉 ALL CLI TESTS PASSED!")
    print("=" * 60 + "\n")


if __name__ == "__main__":
    run_all_tests()
