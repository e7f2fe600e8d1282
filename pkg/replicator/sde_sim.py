# replicator/sde_sim.py - Stochastic replicator integrator and deterministic oracle
"""
The stochastic process is integrated in log-population coordinates:

    L_i <- L_i + [(A x)_i - sigma_i^2 / 2] dt + sigma_i sqrt(dt) xi_i

followed by subtraction of max_i L_i, so x = softmax(L) never leaves the
interior of the simplex. Gaussian draws come from a Philox generator keyed
by the run seed and are produced in fixed-size blocks; the inner loop is a
numba kernel that releases the GIL so batches can run on a thread pool.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, TypeVar, Union

import numpy as np
from numba import njit
from scipy.special import logsumexp, softmax

from config import BATCH_MAX_WORKERS, DEFAULT_BURN_IN_FRACTION, DEFAULT_DT, MAX_RECORDED_POINTS, NOISE_BLOCK_STEPS
from errors import ConfigurationError, SimulationError
from replicator import estimators
from replicator.game_model import Game, SimplexPoint, effective_payoff

logger = logging.getLogger("replicator.sde_sim")

TINY = np.finfo(float).tiny
R = TypeVar("R")


# ================================
# Configuration and trajectories
# ================================

@dataclass(frozen=True)
class SimConfig:
    t_final: float
    dt: float = DEFAULT_DT
    seed: int = 0
    record_stride: Optional[int] = None   # None: keep at most MAX_RECORDED_POINTS points
    x0: Optional[SimplexPoint] = None     # None: barycenter

    def __post_init__(self):
        if not (math.isfinite(self.dt) and math.isfinite(self.t_final)):
            raise ConfigurationError("dt and t_final must be finite")
        if not 0 < self.dt <= self.t_final:
            raise ConfigurationError(f"0 < dt <= t_final violated (dt={self.dt}, t_final={self.t_final})")
        if self.record_stride is not None and self.record_stride < 1:
            raise ConfigurationError(f"record_stride >= 1 violated (got {self.record_stride})")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer (got {self.seed})")
        if self.x0 is not None and not self.x0.interior:
            raise ConfigurationError("x0 must lie in the interior of the simplex")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))

    @property
    def stride(self) -> int:
        if self.record_stride is not None:
            return int(self.record_stride)
        return max(1, math.ceil(self.n_steps / MAX_RECORDED_POINTS))

    def start(self, n: int) -> SimplexPoint:
        if self.x0 is None:
            return SimplexPoint.barycenter(n)
        if self.x0.n != n:
            raise ConfigurationError(f"x0 has length {self.x0.n}, game has n={n}")
        return self.x0

    def to_dict(self, n: int) -> dict:
        return {
            "t_final": self.t_final,
            "dt": self.dt,
            "seed": int(self.seed),
            "record_stride": self.stride,
            "x0": self.start(n).x.tolist(),
        }


@dataclass(frozen=True)
class Trajectory:
    """Recorded path. states[k] = softmax(log_pop[k]), floored at the smallest positive double."""
    times: np.ndarray
    log_pop: np.ndarray
    states: np.ndarray = field(init=False)
    log_states: np.ndarray = field(init=False)

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        log_pop = np.array(self.log_pop, dtype=float)
        log_states = log_pop - logsumexp(log_pop, axis=1, keepdims=True)
        states = np.maximum(softmax(log_pop, axis=1), TINY)
        states /= states.sum(axis=1, keepdims=True)
        for arr in (times, log_pop, states, log_states):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "log_pop", log_pop)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "log_states", log_states)

    @classmethod
    def from_states(cls, times: np.ndarray, states: np.ndarray) -> "Trajectory":
        return cls(times=times, log_pop=np.log(np.maximum(states, TINY)))

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.times.size

    def state(self, k: int) -> SimplexPoint:
        return SimplexPoint(self.states[k])


def _record_steps(n_steps: int, stride: int) -> np.ndarray:
    steps = np.arange(0, n_steps + 1, stride, dtype=np.int64)
    if steps[-1] != n_steps:
        steps = np.append(steps, n_steps)
    return steps


# ================================
# Kernels
# ================================

@njit(nogil=True, cache=True)
def _em_block(log_pop, payoff, drift_shift, noise_scale, dt, noise, first_step, n_steps, stride, rec_log, cursor):
    """Advance noise.shape[0] Euler-Maruyama steps. Returns -1, or the first step with a non-finite state."""
    n = log_pop.shape[0]
    x = np.empty(n)
    for s in range(noise.shape[0]):
        top = log_pop.max()
        total = 0.0
        for i in range(n):
            x[i] = math.exp(log_pop[i] - top)
            total += x[i]
        for i in range(n):
            x[i] /= total
        for i in range(n):
            fitness = 0.0
            for j in range(n):
                fitness += payoff[i, j] * x[j]
            log_pop[i] += (fitness - drift_shift[i]) * dt + noise_scale[i] * noise[s, i]
        step = first_step + s + 1
        top = log_pop.max()
        for i in range(n):
            log_pop[i] -= top
            if not math.isfinite(log_pop[i]):
                return step
        if step % stride == 0 or step == n_steps:
            rec_log[cursor[0], :] = log_pop
            cursor[0] += 1
    return -1


@njit(nogil=True, cache=True)
def _replicator_rhs(payoff, x):
    fitness = payoff @ x
    return x * (fitness - x @ fitness)


@njit(nogil=True, cache=True)
def _rk4(payoff, x0, dt, n_steps, stride, out):
    x = x0.copy()
    out[0, :] = x
    row = 1
    for step in range(1, n_steps + 1):
        k1 = _replicator_rhs(payoff, x)
        k2 = _replicator_rhs(payoff, x + 0.5 * dt * k1)
        k3 = _replicator_rhs(payoff, x + 0.5 * dt * k2)
        k4 = _replicator_rhs(payoff, x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x = np.maximum(x, 0.0)
        x = x / x.sum()
        if step % stride == 0 or step == n_steps:
            out[row, :] = x
            row += 1


# ================================
# Simulation
# ================================

def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def simulate(game: Game, cfg: SimConfig) -> Trajectory:
    n = game.n
    payoff = np.ascontiguousarray(effective_payoff(game))
    drift_shift = 0.5 * game.sigma ** 2
    noise_scale = game.sigma * math.sqrt(cfg.dt)
    n_steps, stride = cfg.n_steps, cfg.stride
    steps = _record_steps(n_steps, stride)

    log_pop = np.log(cfg.start(n).x)
    log_pop -= log_pop.max()
    rec_log = np.empty((steps.size, n))
    rec_log[0] = log_pop
    cursor = np.ones(1, dtype=np.int64)

    logger.info("simulate: n=%d steps=%d dt=%g seed=%d stride=%d", n, n_steps, cfg.dt, cfg.seed, stride)
    rng = make_rng(cfg.seed)
    done = 0
    while done < n_steps:
        block = min(NOISE_BLOCK_STEPS, n_steps - done)
        noise = rng.standard_normal((block, n))
        failed = _em_block(log_pop, payoff, drift_shift, noise_scale, cfg.dt, noise,
                           done, n_steps, stride, rec_log, cursor)
        if failed >= 0:
            raise SimulationError(failed, f"seed={cfg.seed}")
        done += block

    logger.info("simulate: finished seed=%d, %d points recorded", cfg.seed, steps.size)
    return Trajectory(times=steps * cfg.dt, log_pop=rec_log)


def simulate_deterministic(
    game: Game,
    x0: SimplexPoint,
    t_final: float,
    dt: float,
    record_stride: int = 1,
) -> Trajectory:
    """Classical RK4 on the noiseless replicator equation, renormalized every step."""
    if not x0.interior:
        raise ConfigurationError("x0 must lie in the interior of the simplex")
    if not 0 < dt <= t_final or record_stride < 1:
        raise ConfigurationError(f"invalid RK4 grid (dt={dt}, t_final={t_final}, stride={record_stride})")
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    steps = _record_steps(n_steps, record_stride)
    out = np.empty((steps.size, game.n))
    _rk4(np.ascontiguousarray(effective_payoff(game)), x0.x.copy(), dt, n_steps, record_stride, out)
    return Trajectory.from_states(steps * dt, out)


# ================================
# Batches
# ================================

def derive_seed(seed_base: int, run_index: int) -> int:
    """Independent 64-bit seed for run run_index of a batch."""
    state = np.random.SeedSequence([int(seed_base), int(run_index)]).generate_state(1, np.uint64)
    return int(state[0])


@dataclass(frozen=True)
class RunSummary:
    run_index: int
    seed: int
    final_state: np.ndarray
    time_average: np.ndarray
    cooccurrence: np.ndarray
    min_coordinate: float


def summarize_run(run_index: int, seed: int, traj: Trajectory, burn_in: float) -> RunSummary:
    cm = estimators.cooccurrence(traj, burn_in)
    final = traj.states[-1].copy()
    return RunSummary(
        run_index=run_index,
        seed=seed,
        final_state=final,
        time_average=cm.marginals.copy(),
        cooccurrence=cm.p.copy(),
        min_coordinate=float(final.min()),
    )


def batch_map(
    game: Game,
    cfg: SimConfig,
    n_runs: int,
    seed_base: int,
    fn: Callable[[int, int, Trajectory], R],
    max_workers: Optional[int] = None,
) -> List[R]:
    """Run n_runs simulations (seed of run k = derive_seed(seed_base, k)) and map fn over them in run order."""
    if n_runs < 1:
        raise ConfigurationError(f"n_runs >= 1 violated (got {n_runs})")
    workers = max(1, min(max_workers or BATCH_MAX_WORKERS, n_runs))

    def run(k: int) -> R:
        seed = derive_seed(seed_base, k)
        traj = simulate(game, SimConfig(t_final=cfg.t_final, dt=cfg.dt, seed=seed,
                                        record_stride=cfg.record_stride, x0=cfg.x0))
        return fn(k, seed, traj)

    logger.info("batch: %d runs on %d workers, seed_base=%d", n_runs, workers, seed_base)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run, k) for k in range(n_runs)]
        return [f.result() for f in futures]


def batch_simulate(
    game: Game,
    cfg: SimConfig,
    n_runs: int,
    seed_base: int,
    burn_in: Optional[float] = None,
    max_workers: Optional[int] = None,
) -> List[RunSummary]:
    if burn_in is None:
        burn_in = DEFAULT_BURN_IN_FRACTION * cfg.t_final
    return batch_map(
        game, cfg, n_runs, seed_base,
        lambda k, seed, traj: summarize_run(k, seed, traj, burn_in),
        max_workers=max_workers,
    )


# ================================
# Output
# ================================

def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> None:
    header = ",".join(["t"] + [f"x{i + 1}" for i in range(traj.n)])
    data = np.column_stack([traj.times, traj.states])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")
