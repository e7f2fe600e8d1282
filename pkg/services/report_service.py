# services/report_service.py - JSON report assembly shared by the CLI and the API
import logging
from typing import Any, Dict, Optional

import numpy as np

from config import DEFAULT_BURN_IN_FRACTION, NUMERIC_TOL
from replicator import analysis, estimators
from replicator.classify import ClassificationReport, Label, classify, stability_of_vertex
from replicator.game_model import Game, SimplexPoint, effective_payoff, modified_game
from replicator.sde_sim import Trajectory

logger = logging.getLogger("replicator.reports")


def _list(value: Optional[np.ndarray]):
    return None if value is None else np.asarray(value).tolist()


def _labels(indices) -> list:
    """0-based strategy indices to the 1-based labels used in every report."""
    return [int(k) + 1 for k in indices]


def build_analysis_report(game: Game, tol: float = NUMERIC_TOL) -> Dict[str, Any]:
    mg = modified_game(game)
    eq = analysis.equalizer_set(mg, tol)
    nash = analysis.interior_nash(mg, tol)
    definiteness = analysis.conditional_definiteness(mg.atilde, tol)
    gamma = analysis.check_condition_33(game, tol)
    second = analysis.corollary_312_analysis(game, tol)
    separation = analysis.separating_direction(mg, tol)
    pure = [k for k in range(game.n) if analysis.is_nash(mg, SimplexPoint.vertex(game.n, k), tol)]

    dirichlet = None
    params = analysis.dirichlet_invariant(game, tol)
    if params is not None:
        mean, var = analysis.dirichlet_moments(params)
        certificate = analysis.theorem_36_certificate(game, params.alpha, tol)
        dirichlet = {
            "alpha": params.alpha.tolist(),
            "gamma": params.gamma,
            "mean": _list(mean),
            "variance": _list(var),
            "cross_moments": analysis.dirichlet_cross_moments(params).tolist(),
            "density_certificate": certificate.clause,
        }

    return {
        "n": game.n,
        "interpretation": game.interpretation.value,
        "effective_payoff": effective_payoff(game).tolist(),
        "modified_payoff": mg.atilde.tolist(),
        "equalizer": {
            "kind": eq.kind.value,
            "point": _list(eq.point),
            "basis": _list(eq.basis),
            "in_simplex": None if eq.in_simplex is None else eq.in_simplex.value,
        },
        "interior_nash": None if nash.point is None else nash.point.x.tolist(),
        "interior_nash_unique": nash.unique,
        "pure_nash": _labels(pure),
        "strict_pure_nash": _labels(analysis.strict_pure_nash(mg, tol)),
        "definiteness": {"label": definiteness.label.value, "eigenvalues": definiteness.eigenvalues.tolist()},
        "gamma": gamma,
        "dirichlet": dirichlet,
        "second_density": {
            "has_310": second.has_310,
            "beta": _list(second.beta),
            "c": second.c,
            "second_alpha": _list(second.second_alpha),
            "transient": second.transient,
        },
        "dominated": {
            str(k + 1): {"q": d.q.tolist(), "margin": d.margin}
            for k, d in analysis.dominated_strategies(mg, tol).items()
        },
        "separating_direction": None if separation is None else {
            "c": separation.c.tolist(),
            "margin": separation.margin,
        },
    }


def build_classification_report(game: Game, tol: float = NUMERIC_TOL) -> Dict[str, Any]:
    report = classify(game, tol)
    payload = report.to_dict()
    payload["vertex_stability"] = {
        str(k + 1): stability_of_vertex(game, k, tol).to_dict() for k in range(game.n)
    }
    return payload


def dirichlet_params_for(report: ClassificationReport) -> Optional[analysis.DirichletParams]:
    """Dirichlet law named by a positive-recurrence certificate, if any."""
    if report.label is not Label.POSITIVE_RECURRENT or "alpha" not in report.certificate.witness:
        return None
    return analysis.DirichletParams(report.certificate.witness["alpha"])


def build_estimator_report(
    game: Game,
    traj: Trajectory,
    burn_in: Optional[float] = None,
    tol: float = NUMERIC_TOL,
) -> Dict[str, Any]:
    if burn_in is None:
        burn_in = DEFAULT_BURN_IN_FRACTION * traj.t_final
    mg = modified_game(game)
    average = estimators.time_average(traj, burn_in)
    cm = estimators.cooccurrence(traj, burn_in)
    boundary = estimators.boundary_diagnostics(traj)
    grid = np.linspace(traj.t_final / 10.0, traj.t_final, 10)
    timescale = estimators.timescale_condition(traj, grid, equalizer=analysis.equalizer_set(mg, tol))

    report = {
        "t_final": traj.t_final,
        "burn_in": float(burn_in),
        "points": len(traj),
        "time_average": average.x.tolist(),
        "cooccurrence": cm.to_dict(),
        "hannan_residuals": estimators.hannan_residuals(mg, cm).tolist(),
        "boundary": boundary.to_dict(),
        "timescale": timescale.to_dict(),
        "dirichlet_check": None,
    }
    params = dirichlet_params_for(classify(game, tol))
    if params is not None:
        report["dirichlet_check"] = estimators.dirichlet_moment_check(traj, params, burn_in).to_dict()
    return report
