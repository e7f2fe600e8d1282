# services/verification.py - Monte Carlo battery tying simulations to the classification
"""
Checks depend on the label:
    PositiveRecurrent  time average vs interior equilibrium, co-occurrence residual
                       bounds, Dirichlet co-occurrence, variance and moment z-scores
    Transient          fraction of runs ending within BOUNDARY_LEVEL of the boundary
    strict equilibria  local stability from starts near each stable vertex
    dominated k        extinction of every strictly dominated strategy
Every game also gets the certificate re-check.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config import (
    BOUNDARY_FRACTION, BOUNDARY_LEVEL, COOCCURRENCE_TOL, DEFAULT_BURN_IN_FRACTION, DEFAULT_DT,
    HANNAN_TOL, MOMENT_Z_LIMIT, NUMERIC_TOL, STABILITY_NEIGHBORHOOD, STABILITY_RUNS,
    STABILITY_START_DISTANCE, STABILITY_T_FINAL, STABILITY_TARGET_DISTANCE, TIME_AVERAGE_TOL,
    VARIANCE_REL_TOL, VERIFY_RUNS, VERIFY_SEED_BASE, VERIFY_T_FINAL,
)
from replicator import analysis, estimators
from replicator.classify import Label, classify
from replicator.game_model import Game, SimplexPoint, modified_game
from replicator.sde_sim import RunSummary, SimConfig, Trajectory, batch_map, derive_seed, summarize_run
from services.report_service import dirichlet_params_for

logger = logging.getLogger("replicator.verify")


@dataclass
class Check:
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": None if self.value is None else float(self.value),
            "threshold": None if self.threshold is None else float(self.threshold),
            "detail": self.detail,
        }


@dataclass
class VerificationResult:
    label: str
    runs: int
    t_final: float
    seed_base: int
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "runs": self.runs,
            "t_final": self.t_final,
            "seed_base": self.seed_base,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }


def format_table(result: VerificationResult) -> str:
    lines = [f"{'check':<34} {'result':<6} {'value':>12} {'threshold':>12}  detail"]
    for c in result.checks:
        value = "" if c.value is None else f"{c.value:.6g}"
        threshold = "" if c.threshold is None else f"{c.threshold:.6g}"
        lines.append(f"{c.name:<34} {'PASS' if c.passed else 'FAIL':<6} {value:>12} {threshold:>12}  {c.detail}")
    return "\n".join(lines)


@dataclass
class _RunDigest:
    summary: RunSummary
    moments: Optional[estimators.MomentCheck]


# ================================
# Individual checks
# ================================

def _recurrence_checks(game: Game, digests: List[_RunDigest], nash: np.ndarray,
                       params: Optional[analysis.DirichletParams]) -> List[Check]:
    summaries = [d.summary for d in digests]
    pooled_avg = np.mean([s.time_average for s in summaries], axis=0)
    pooled_p = np.mean([s.cooccurrence for s in summaries], axis=0)
    checks = []

    err = float(np.abs(pooled_avg - nash).max())
    checks.append(Check("time_average", err <= TIME_AVERAGE_TOL, err, TIME_AVERAGE_TOL,
                        f"pooled {np.round(pooled_avg, 4).tolist()}"))

    r = estimators.hannan_residuals(modified_game(game), estimators.CooccurrenceMatrix.from_matrix(pooled_p))
    checks.append(Check("hannan_lower_bound", r.min() >= -HANNAN_TOL, float(r.min()), -HANNAN_TOL))
    checks.append(Check("hannan_equality", np.abs(r).min() <= HANNAN_TOL, float(np.abs(r).min()), HANNAN_TOL))

    if params is None:
        return checks

    target = analysis.dirichlet_cross_moments(params)
    err = float(np.abs(pooled_p - target).max())
    checks.append(Check("cooccurrence", err <= COOCCURRENCE_TOL, err, COOCCURRENCE_TOL))

    _, target_var = analysis.dirichlet_moments(params)
    var = np.mean([np.diag(s.cooccurrence) - s.time_average ** 2 for s in summaries], axis=0)
    rel = float(np.abs(var / target_var - 1.0).max())
    checks.append(Check("variance", rel <= VARIANCE_REL_TOL, rel, VARIANCE_REL_TOL,
                        f"empirical {np.round(var, 5).tolist()}"))

    scale = np.sqrt(len(digests))
    z_mean = np.sum([d.moments.z_mean for d in digests], axis=0) / scale
    z_var = np.sum([d.moments.z_variance for d in digests], axis=0) / scale
    worst = float(max(np.abs(z_mean).max(), np.abs(z_var).max()))
    checks.append(Check("dirichlet_moment_z", worst <= MOMENT_Z_LIMIT, worst, MOMENT_Z_LIMIT))
    return checks


def _fraction_check(name: str, hits: List[bool], detail: str = "") -> Check:
    frac = float(np.mean(hits))
    return Check(name, frac >= BOUNDARY_FRACTION, frac, BOUNDARY_FRACTION, detail)


def near_vertex_start(n: int, k: int, distance: float = STABILITY_START_DISTANCE) -> SimplexPoint:
    """Point at Euclidean distance `distance` from e_k, towards the centre of the opposite face."""
    e = np.zeros(n)
    e[k] = 1.0
    face = (1.0 - e) / (n - 1)
    direction = (face - e) / np.linalg.norm(face - e)
    return SimplexPoint.from_weights(e + distance * direction)


def stability_check(
    game: Game,
    k: int,
    seed_base: int,
    runs: int = STABILITY_RUNS,
    t_final: float = STABILITY_T_FINAL,
    dt: float = DEFAULT_DT,
    max_workers: Optional[int] = None,
) -> Check:
    vertex = np.zeros(game.n)
    vertex[k] = 1.0

    def outcome(_, __, traj: Trajectory) -> bool:
        dist = np.linalg.norm(traj.states - vertex, axis=1)
        return bool(dist.max() <= STABILITY_NEIGHBORHOOD and dist[-1] < STABILITY_TARGET_DISTANCE)

    cfg = SimConfig(t_final=t_final, dt=dt, x0=near_vertex_start(game.n, k))
    hits = batch_map(game, cfg, runs, seed_base, outcome, max_workers=max_workers)
    return _fraction_check(f"stability_vertex_{k + 1}", hits, f"{runs} runs to T={t_final:g}")


# ================================
# Battery
# ================================

def run_verification(
    game: Game,
    runs: int = VERIFY_RUNS,
    t_final: float = VERIFY_T_FINAL,
    seed_base: int = VERIFY_SEED_BASE,
    dt: float = DEFAULT_DT,
    tol: float = NUMERIC_TOL,
    stability_runs: int = STABILITY_RUNS,
    stability_t_final: float = STABILITY_T_FINAL,
    max_workers: Optional[int] = None,
) -> VerificationResult:
    report = classify(game, tol)
    result = VerificationResult(label=report.label.value, runs=runs, t_final=t_final, seed_base=seed_base)
    conflicts = report.diagnostics["conflicts"]
    result.checks.append(Check(
        "certificate",
        bool(report.diagnostics["certificate_checked"]) and not conflicts,
        detail=report.certificate.rule + (f"; conflicts: {', '.join(conflicts)}" if conflicts else ""),
    ))

    recurrent = report.label is Label.POSITIVE_RECURRENT
    transient = report.label is Label.TRANSIENT
    if recurrent or transient or report.vanishing_strategies:
        params = dirichlet_params_for(report)
        burn_in = DEFAULT_BURN_IN_FRACTION * t_final

        def digest(k: int, seed: int, traj: Trajectory) -> _RunDigest:
            moments = None if params is None else estimators.dirichlet_moment_check(traj, params, burn_in)
            return _RunDigest(summarize_run(k, seed, traj, burn_in), moments)

        logger.info("verify: %s, %d runs to T=%g", report.label.value, runs, t_final)
        digests = batch_map(game, SimConfig(t_final=t_final, dt=dt), runs, seed_base, digest,
                            max_workers=max_workers)

        if recurrent:
            nash = np.asarray(report.diagnostics["interior_nash"])
            result.checks.extend(_recurrence_checks(game, digests, nash, params))
        if transient:
            hits = [d.summary.min_coordinate < BOUNDARY_LEVEL for d in digests]
            result.checks.append(_fraction_check("boundary_approach", hits, f"min_i X_i(T) < {BOUNDARY_LEVEL:g}"))
        for k in report.vanishing_strategies:
            hits = [d.summary.final_state[k] < BOUNDARY_LEVEL for d in digests]
            result.checks.append(_fraction_check(f"extinction_strategy_{k + 1}", hits))

    for k in report.stable_vertices:
        result.checks.append(stability_check(
            game, k, derive_seed(seed_base, 1_000_000 + k),
            runs=stability_runs, t_final=stability_t_final, dt=dt, max_workers=max_workers,
        ))

    logger.info("verify: %s", "PASS" if result.passed else f"FAIL ({', '.join(result.failed)})")
    return result
