# cli.py - Command-line front end
"""
Usage:
    python cli.py analyze  GAME [--out FILE]
    python cli.py classify GAME [--out FILE]
    python cli.py simulate GAME --t-final T [--dt DT] [--seed S] [--x0 a,b,..] [--stride K] [--out FILE.csv]
    python cli.py verify   GAME [--runs R] [--t-final T] [--seed-base S] [--out FILE]
    python cli.py replay   MANIFEST [--out FILE]
    python cli.py schema   NAME

Exit codes: 0 success, 1 verification failed, 2 invalid input, 3 numerical failure.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import (
    DEFAULT_DT, NUMERIC_TOL, STABILITY_RUNS, STABILITY_T_FINAL, VERIFY_RUNS, VERIFY_SEED_BASE, VERIFY_T_FINAL,
)
from errors import ConfigurationError, ReplicatorException, VerificationFailed, logger
from models.schemas import SCHEMAS, parse_game, schema_for
from replicator.game_model import Game, SimplexPoint
from replicator.sde_sim import SimConfig, simulate, write_trajectory_csv
from services.game_io import load_game
from services.manifest import RunManifest, read_manifest, write_manifest
from services.report_service import build_analysis_report, build_classification_report, build_estimator_report
from services.verification import format_table, run_verification


def _emit(payload: Dict[str, Any], out: Optional[Path]) -> List[str]:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
        return []
    out.write_text(text)
    return [str(out)]


def _parse_x0(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigurationError(f"--x0 expects comma-separated numbers, got {text!r}")


# ================================
# Commands
# ================================

def execute(command: str, game: Game, config: Dict[str, Any], out: Optional[Path],
            game_file: Optional[str] = None) -> int:
    """Run one command with a fully resolved configuration; the manifest records exactly this call."""
    tol = config["tol"]
    seeds: List[int] = []

    if command == "analyze":
        outputs = _emit(build_analysis_report(game, tol), out)

    elif command == "classify":
        outputs = _emit(build_classification_report(game, tol), out)

    elif command == "simulate":
        x0 = None if config["x0"] is None else SimplexPoint.from_weights(config["x0"])
        cfg = SimConfig(t_final=config["t_final"], dt=config["dt"], seed=config["seed"],
                        record_stride=config["record_stride"], x0=x0)
        config.update(cfg.to_dict(game.n))
        seeds = [int(cfg.seed)]
        traj = simulate(game, cfg)
        report = build_estimator_report(game, traj, config["burn_in"], tol)
        config["burn_in"] = report["burn_in"]
        if out is None:
            outputs = _emit(report, None)
        else:
            write_trajectory_csv(traj, out)
            outputs = [str(out)] + _emit(report, out.with_suffix(".json"))

    elif command == "verify":
        result = run_verification(
            game,
            runs=config["runs"],
            t_final=config["t_final"],
            seed_base=config["seed_base"],
            dt=config["dt"],
            tol=tol,
            stability_runs=config["stability_runs"],
            stability_t_final=config["stability_t_final"],
        )
        seeds = [int(config["seed_base"])]
        outputs = _emit(result.to_dict(), out)
        if out is not None:
            _write_manifest(command, game, config, game_file, seeds, outputs)
        if not result.passed:
            sys.stderr.write(format_table(result) + "\n")
            raise VerificationFailed(result.failed)
        return 0

    else:
        raise ConfigurationError(f"unknown command {command!r}")

    if out is not None:
        _write_manifest(command, game, config, game_file, seeds, outputs)
    return 0


def _write_manifest(command, game, config, game_file, seeds, outputs) -> None:
    manifest = RunManifest(command=command, game=game.to_dict(), config=dict(config),
                           game_file=game_file, seeds=seeds, outputs=outputs)
    write_manifest(manifest, outputs[0])


def _config_from_args(args: argparse.Namespace, tol: float) -> Dict[str, Any]:
    if args.command in ("analyze", "classify"):
        return {"tol": tol}
    if args.command == "simulate":
        return {
            "t_final": args.t_final,
            "dt": args.dt,
            "seed": args.seed,
            "record_stride": args.stride,
            "x0": _parse_x0(args.x0),
            "burn_in": args.burn_in,
            "tol": tol,
        }
    return {
        "runs": args.runs,
        "t_final": args.t_final,
        "seed_base": args.seed_base,
        "dt": args.dt,
        "stability_runs": args.stability_runs,
        "stability_t_final": args.stability_t_final,
        "tol": tol,
    }


def cmd_replay(manifest_file: str, out: Optional[Path]) -> int:
    manifest = read_manifest(manifest_file)
    game = parse_game(manifest.game)
    target = out if out is not None else Path(manifest.outputs[0]) if manifest.outputs else None
    logger.info("replay: %s from %s", manifest.command, manifest_file)
    return execute(manifest.command, game, dict(manifest.config), target, manifest.game_file)


def cmd_schema(name: str) -> int:
    try:
        schema = schema_for(name)
    except KeyError:
        raise ConfigurationError(f"unknown schema {name!r}; choose from {', '.join(SCHEMAS)}")
    sys.stdout.write(json.dumps(schema, indent=2) + "\n")
    return 0


# ================================
# Argument parsing
# ================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="replicator",
        description="Analyze, classify and simulate symmetric games under aggregate shocks.",
    )
    parser.add_argument("--tol-scale", type=float, default=1.0, help="multiply the default tolerances")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("analyze", "static analysis report"), ("classify", "long-run classification")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("game")
        p.add_argument("--out", type=Path)

    p = sub.add_parser("simulate", help="simulate one trajectory and estimate ergodic quantities")
    p.add_argument("game")
    p.add_argument("--t-final", type=float, required=True)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x0", help="comma-separated interior start (default: barycenter)")
    p.add_argument("--stride", type=int, help="record every k-th step")
    p.add_argument("--burn-in", type=float, help="estimator burn-in time (default: 1%% of the horizon)")
    p.add_argument("--out", type=Path, help="trajectory CSV; the estimator report goes next to it as .json")

    p = sub.add_parser("verify", help="Monte Carlo verification battery")
    p.add_argument("game")
    p.add_argument("--runs", type=int, default=VERIFY_RUNS)
    p.add_argument("--t-final", type=float, default=VERIFY_T_FINAL)
    p.add_argument("--seed-base", type=int, default=VERIFY_SEED_BASE)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--stability-runs", type=int, default=STABILITY_RUNS)
    p.add_argument("--stability-t-final", type=float, default=STABILITY_T_FINAL)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", type=Path, help="write the outputs here instead of the recorded path")

    p = sub.add_parser("schema", help="print a published JSON schema")
    p.add_argument("name", choices=sorted(SCHEMAS))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)
        logger.setLevel(logging.WARNING)

    try:
        if not args.tol_scale > 0:
            raise ConfigurationError(f"--tol-scale must be positive, got {args.tol_scale}")
        if args.command == "schema":
            return cmd_schema(args.name)
        if args.command == "replay":
            return cmd_replay(args.manifest, args.out)
        tol = NUMERIC_TOL * args.tol_scale
        game = load_game(args.game)
        return execute(args.command, game, _config_from_args(args, tol), args.out, args.game)
    except ReplicatorException as e:
        logger.error(e.message)
        sys.stderr.write(f"error: {e.message}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
