# replicator/estimators.py - Ergodic averages and residual diagnostics over trajectories
"""
All time integrals use the trapezoid rule over the recorded points at or
after burn_in. The same weights serve time_average and cooccurrence, so the
co-occurrence marginals reproduce the time average up to rounding.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from config import BATCH_MEANS_BATCHES, DEFAULT_THIN
from errors import EstimatorError
from replicator.analysis import DirichletParams, EqualizerResult, dirichlet_moments
from replicator.game_model import ModifiedGame, SimplexPoint

if TYPE_CHECKING:
    from replicator.sde_sim import Trajectory

logger = logging.getLogger("replicator.estimators")


def _window(traj: "Trajectory", burn_in: float) -> np.ndarray:
    if burn_in >= traj.t_final:
        raise EstimatorError(f"burn_in {burn_in} is not before the final time {traj.t_final}")
    idx = np.flatnonzero(traj.times >= burn_in)
    if idx.size < 2:
        raise EstimatorError(f"fewer than 2 recorded points after burn_in={burn_in}")
    return idx


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    """Weights w with sum(w) = 1 so that w @ f is the trapezoid average of f."""
    gaps = np.diff(times)
    w = np.zeros(times.size)
    w[:-1] += 0.5 * gaps
    w[1:] += 0.5 * gaps
    return w / gaps.sum()


def time_average(traj: "Trajectory", burn_in: float = 0.0) -> SimplexPoint:
    idx = _window(traj, burn_in)
    w = _trapezoid_weights(traj.times[idx])
    return SimplexPoint.from_weights(w @ traj.states[idx])


@dataclass(frozen=True)
class CooccurrenceMatrix:
    p: np.ndarray
    marginals: np.ndarray

    @classmethod
    def from_matrix(cls, p: np.ndarray) -> "CooccurrenceMatrix":
        p = np.asarray(p, dtype=float)
        return cls(p=p, marginals=p.sum(axis=1))

    def to_dict(self) -> dict:
        return {"p": self.p.tolist(), "marginals": self.marginals.tolist()}


def cooccurrence(traj: "Trajectory", burn_in: float = 0.0) -> CooccurrenceMatrix:
    idx = _window(traj, burn_in)
    w = _trapezoid_weights(traj.times[idx])
    states = traj.states[idx]
    p = (states * w[:, None]).T @ states
    p = 0.5 * (p + p.T)
    return CooccurrenceMatrix(p=p, marginals=p.sum(axis=1))


def hannan_residuals(
    game: ModifiedGame,
    cm: CooccurrenceMatrix,
    sigma: Optional[np.ndarray] = None,
) -> np.ndarray:
    """r_l = sum_ij a_ij p_ij + 1/2 sum_j sigma_j^2 (p_j - p_jj) - (A p)_l on the modified game."""
    sigma = game.sigma if sigma is None else np.asarray(sigma, dtype=float)
    at = game.atilde
    p, marg = cm.p, cm.marginals
    value = float(np.sum(at * p)) + 0.5 * float(np.sum(sigma ** 2 * (marg - np.diag(p))))
    return value - at @ marg


# ================================
# Boundary behaviour
# ================================

@dataclass(frozen=True)
class BoundaryDiagnostics:
    min_final: float
    log_slopes: np.ndarray   # least-squares slope of log X_i over the last half of the run

    def to_dict(self) -> dict:
        return {"min_final": self.min_final, "log_slope": self.log_slopes.tolist()}


def boundary_diagnostics(traj: "Trajectory") -> BoundaryDiagnostics:
    tail = np.flatnonzero(traj.times >= 0.5 * traj.t_final)
    if tail.size < 2:
        tail = np.arange(len(traj))
    slopes = np.polyfit(traj.times[tail], traj.log_states[tail], 1)[0]
    return BoundaryDiagnostics(min_final=float(traj.states[-1].min()), log_slopes=np.atleast_1d(slopes))


# ================================
# Dirichlet moment check
# ================================

@dataclass(frozen=True)
class MomentCheck:
    n_samples: int
    mean: np.ndarray
    variance: np.ndarray
    target_mean: np.ndarray
    target_variance: np.ndarray
    z_mean: np.ndarray
    z_variance: np.ndarray

    @property
    def max_abs_z(self) -> float:
        return float(max(np.abs(self.z_mean).max(), np.abs(self.z_variance).max()))

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "mean": self.mean.tolist(),
            "variance": self.variance.tolist(),
            "target_mean": self.target_mean.tolist(),
            "target_variance": self.target_variance.tolist(),
            "z_mean": self.z_mean.tolist(),
            "z_variance": self.z_variance.tolist(),
        }


def batch_means_se(samples: np.ndarray, n_batches: int = BATCH_MEANS_BATCHES) -> np.ndarray:
    """Batch-means standard error of the column means of samples (rows are successive draws)."""
    size = samples.shape[0] // n_batches
    if size < 1 or n_batches < 2:
        raise EstimatorError(f"{samples.shape[0]} samples cannot fill {n_batches} batches")
    batches = samples[:size * n_batches].reshape(n_batches, size, *samples.shape[1:]).mean(axis=1)
    return batches.std(axis=0, ddof=1) / np.sqrt(n_batches)


def dirichlet_moment_check(
    traj: "Trajectory",
    params: DirichletParams,
    burn_in: float = 0.0,
    thin: int = DEFAULT_THIN,
) -> MomentCheck:
    idx = _window(traj, burn_in)[::max(1, int(thin))]
    x = traj.states[idx]
    n_batches = min(BATCH_MEANS_BATCHES, x.shape[0] // 2)
    mean = x.mean(axis=0)
    sq_dev = (x - mean) ** 2
    variance = sq_dev.mean(axis=0)
    target_mean, target_variance = dirichlet_moments(params)
    tiny = np.finfo(float).tiny
    z_mean = (mean - target_mean) / np.maximum(batch_means_se(x, n_batches), tiny)
    z_variance = (variance - target_variance) / np.maximum(batch_means_se(sq_dev, n_batches), tiny)
    logger.debug("moment check: %d samples, max|z|=%.3g", x.shape[0],
                 max(np.abs(z_mean).max(), np.abs(z_variance).max()))
    return MomentCheck(
        n_samples=int(x.shape[0]),
        mean=mean,
        variance=variance,
        target_mean=np.asarray(target_mean),
        target_variance=np.asarray(target_variance),
        z_mean=z_mean,
        z_variance=z_variance,
    )


# ================================
# Vanishing log-rate condition
# ================================

@dataclass(frozen=True)
class TimescaleReport:
    sample_times: np.ndarray
    values: np.ndarray                 # values[k, i] = |log X_i(T_k)| / T_k
    max_per_time: np.ndarray           # max over strategies at each T_k
    satisfied: np.ndarray              # max_per_time <= threshold
    equalizer_distance: Optional[np.ndarray]  # distance of the average over [0, T_k] to the equalizer set

    def to_dict(self) -> dict:
        return {
            "sample_times": self.sample_times.tolist(),
            "values": self.values.tolist(),
            "max_per_time": self.max_per_time.tolist(),
            "satisfied": self.satisfied.tolist(),
            "equalizer_distance": None if self.equalizer_distance is None else [
                float(d) if np.isfinite(d) else None for d in self.equalizer_distance
            ],
        }


def timescale_condition(
    traj: "Trajectory",
    sample_times: Sequence[float],
    threshold: float = 1e-2,
    equalizer: Optional[EqualizerResult] = None,
) -> TimescaleReport:
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.size == 0 or np.any(sample_times <= traj.times[0]) or np.any(sample_times > traj.t_final):
        raise EstimatorError("sample_times must lie in (0, T]")
    idx = np.clip(np.searchsorted(traj.times, sample_times), 0, len(traj) - 1)
    at = traj.times[idx]
    values = np.abs(traj.log_states[idx]) / at[:, None]
    worst = values.max(axis=1)

    distances = None
    if equalizer is not None:
        integral = cumulative_trapezoid(traj.states, traj.times, axis=0, initial=0.0)
        partial = integral[idx] / (at - traj.times[0])[:, None]
        distances = np.array([equalizer.distance(y) for y in partial])

    return TimescaleReport(
        sample_times=at,
        values=values,
        max_per_time=worst,
        satisfied=worst <= threshold,
        equalizer_distance=distances,
    )
