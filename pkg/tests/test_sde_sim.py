# tests/test_sde_sim.py - Tests for the stochastic integrator, the RK4 oracle and batches
import sys
import os

# Add project root to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from errors import ConfigurationError, SimulationError
from replicator.game_model import Game, SimplexPoint, scale_noise
from replicator.sde_sim import (
    SimConfig, Trajectory, _record_steps, batch_simulate, derive_seed, simulate,
    simulate_deterministic, write_trajectory_csv,
)


RSP_RECURRENT = Game(payoff=[[0, -1, 2], [2, 0, -1], [-1, 2, 0]], sigma=[0.5] * 3)
RSP_NEUTRAL = Game(payoff=[[0, -1, 1], [1, 0, -1], [-1, 1, 0]], sigma=[0.5] * 3)
MATCHING = Game(payoff=[[0, 1], [1, 0]], sigma=[1, 1])


def test_sim_config_validation():
    print("🧪 Testing SimConfig validation...")

    with pytest.raises(ConfigurationError):
        SimConfig(t_final=0.5, dt=1.0)
    with pytest.raises(ConfigurationError):
        SimConfig(t_final=1.0, dt=0.0)
    with pytest.raises(ConfigurationError):
        SimConfig(t_final=1.0, dt=0.1, record_stride=0)
    with pytest.raises(ConfigurationError):
        SimConfig(t_final=1.0, dt=0.1, seed=-1)
    with pytest.raises(ConfigurationError):
        SimConfig(t_final=1.0, dt=0.1, x0=SimplexPoint.vertex(3, 0))
    with pytest.raises(ConfigurationError):
        SimConfig(t_final=1.0, dt=0.1, x0=SimplexPoint.barycenter(2)).start(3)

    assert SimConfig(t_final=1.0, dt=0.1).n_steps == 10
    assert SimConfig(t_final=1.05, dt=0.1).n_steps == 11
    assert SimConfig(t_final=1.0, dt=0.1, record_stride=4).stride == 4
    assert np.allclose(SimConfig(t_final=1.0, dt=0.1).start(4).x, 0.25)
    print("   ✅ SimConfig validation passed")


def test_record_steps():
    print("🧪 Testing recorded step grid...")

    assert _record_steps(10, 3).tolist() == [0, 3, 6, 9, 10]
    assert _record_steps(9, 3).tolist() == [0, 3, 6, 9]
    assert _record_steps(5, 1).tolist() == [0, 1, 2, 3, 4, 5]
    print("   ✅ Recorded step grid passed")


def test_trajectory_shape_and_simplex():
    print("🧪 Testing trajectory shape...")

    cfg = SimConfig(t_final=2.0, dt=1e-3, seed=3, record_stride=10)
    traj = simulate(RSP_RECURRENT, cfg)
    assert len(traj) == 201
    assert traj.n == 3
    assert traj.times[0] == 0.0 and np.isclose(traj.t_final, 2.0)
    assert np.allclose(traj.states[0], 1 / 3)
    assert np.all(traj.states > 0)
    assert np.allclose(traj.states.sum(axis=1), 1.0)
    assert np.allclose(np.exp(traj.log_states), traj.states)
    assert isinstance(traj.state(5), SimplexPoint)
    print("   ✅ Trajectory shape passed")


def test_simulation_is_deterministic():
    """Same seed, same bits; different seed, different path."""
    print("🧪 Testing determinism...")

    cfg = SimConfig(t_final=1.0, dt=1e-3, seed=42)
    a = simulate(MATCHING, cfg)
    b = simulate(MATCHING, cfg)
    assert np.array_equal(a.log_pop, b.log_pop)
    assert np.array_equal(a.times, b.times)

    c = simulate(MATCHING, SimConfig(t_final=1.0, dt=1e-3, seed=43))
    assert not np.array_equal(a.log_pop, c.log_pop)
    print("   ✅ Determinism passed")


def test_small_noise_tracks_rk4():
    """With vanishing noise the Euler-Maruyama path follows the deterministic replicator flow."""
    print("🧪 Testing small-noise limit against RK4...")

    quiet = scale_noise(RSP_RECURRENT, 1e-5)
    x0 = SimplexPoint.from_weights([0.5, 0.3, 0.2])
    stochastic = simulate(quiet, SimConfig(t_final=5.0, dt=1e-3, seed=1, record_stride=100, x0=x0))
    oracle = simulate_deterministic(quiet, x0, t_final=5.0, dt=1e-3, record_stride=100)
    assert np.allclose(stochastic.times, oracle.times)
    err = np.abs(stochastic.states - oracle.states).max()
    assert err < 2e-2, f"max deviation {err}"
    print(f"   ✅ Small-noise limit passed (max deviation {err:.2e})")


def test_rk4_conserves_product_on_neutral_cycle():
    print("🧪 Testing RK4 on a neutral cycle...")

    x0 = SimplexPoint.from_weights([0.6, 0.3, 0.1])
    traj = simulate_deterministic(RSP_NEUTRAL, x0, t_final=10.0, dt=1e-2)
    product = traj.states.prod(axis=1)
    assert np.abs(product - product[0]).max() < 1e-6

    with pytest.raises(ConfigurationError):
        simulate_deterministic(RSP_NEUTRAL, SimplexPoint.vertex(3, 0), t_final=1.0, dt=0.1)
    print("   ✅ RK4 conservation passed")


def test_rk4_rest_point_and_convergence():
    print("🧪 Testing RK4 rest point and convergence...")

    center = SimplexPoint.barycenter(3)
    traj = simulate_deterministic(RSP_RECURRENT, center, t_final=100.0, dt=1e-2, record_stride=100)
    assert np.abs(traj.states - 1.0 / 3.0).max() < 1e-9

    traj = simulate_deterministic(MATCHING, SimplexPoint.from_weights([0.9, 0.1]), t_final=30.0, dt=1e-2)
    gaps = np.abs(traj.states[:, 0] - 0.5)
    assert gaps[-1] < 1e-4
    assert np.all(np.diff(gaps) <= 1e-15)
    print("   ✅ RK4 rest point and convergence passed")


def test_non_finite_state_raises():
    print("🧪 Testing numerical failure...")

    huge = 1.7e308
    game = Game(payoff=[[huge, huge], [-huge, -huge]], sigma=[1, 1])
    with pytest.raises(SimulationError) as exc:
        simulate(game, SimConfig(t_final=1.0, dt=1.0))
    assert exc.value.step == 1
    assert exc.value.exit_code == 3
    print("   ✅ Numerical failure passed")


def test_derive_seed():
    print("🧪 Testing seed derivation...")

    seeds = [derive_seed(7, k) for k in range(50)]
    assert len(set(seeds)) == 50
    assert seeds == [derive_seed(7, k) for k in range(50)]
    assert derive_seed(8, 0) != seeds[0]
    assert all(0 <= s < 2 ** 64 for s in seeds)
    print("   ✅ Seed derivation passed")


def test_batch_order_and_worker_independence():
    """Batch results come back in run order and do not depend on the worker count."""
    print("🧪 Testing batches...")

    cfg = SimConfig(t_final=1.0, dt=1e-3)
    serial = batch_simulate(MATCHING, cfg, n_runs=4, seed_base=5, max_workers=1)
    pooled = batch_simulate(MATCHING, cfg, n_runs=4, seed_base=5, max_workers=3)

    assert [s.run_index for s in pooled] == [0, 1, 2, 3]
    for a, b in zip(serial, pooled):
        assert a.seed == b.seed
        assert np.array_equal(a.final_state, b.final_state)
        assert np.array_equal(a.cooccurrence, b.cooccurrence)

    single = simulate(MATCHING, SimConfig(t_final=1.0, dt=1e-3, seed=derive_seed(5, 2)))
    assert np.array_equal(pooled[2].final_state, single.states[-1])

    with pytest.raises(ConfigurationError):
        batch_simulate(MATCHING, cfg, n_runs=0, seed_base=5)
    print("   ✅ Batches passed")


def test_write_trajectory_csv(tmp_path):
    print("🧪 Testing trajectory CSV...")

    traj = simulate(MATCHING, SimConfig(t_final=0.5, dt=1e-2, seed=9))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)

    lines = path.read_text().splitlines()
    assert lines[0] == "t,x1,x2"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 0], traj.times)
    assert np.array_equal(data[:, 1:], traj.states)
    print("   ✅ Trajectory CSV passed")


def test_from_states_copies_input():
    print("🧪 Testing Trajectory.from_states...")

    times = np.array([0.0, 1.0])
    states = np.array([[0.5, 0.5], [0.25, 0.75]])
    traj = Trajectory.from_states(times, states)
    times[0] = 9.0
    assert traj.times[0] == 0.0
    assert np.allclose(traj.states, states)
    print("   ✅ from_states passed")


def test_log_ratio_noise_is_exact():
    """With a zero payoff matrix each log-ratio increment is N(-(s_i^2 - s_j^2) dt / 2, (s_i^2 + s_j^2) dt)."""
    print("🧪 Testing log-ratio increments under pure noise...")

    sigma = np.array([0.5, 1.0, 0.8])
    game = Game(payoff=np.zeros((3, 3)), sigma=sigma)
    dt = 1e-3
    traj = simulate(game, SimConfig(t_final=20.0, dt=dt, seed=17, record_stride=1))

    for i, j in ((0, 1), (1, 2), (0, 2)):
        increments = np.diff(traj.log_states[:, i] - traj.log_states[:, j])
        m = increments.size
        mean = -0.5 * (sigma[i] ** 2 - sigma[j] ** 2) * dt
        var = (sigma[i] ** 2 + sigma[j] ** 2) * dt
        z_mean = (increments.mean() - mean) / np.sqrt(var / m)
        z_var = (increments.var(ddof=1) / var - 1.0) / np.sqrt(2.0 / (m - 1))
        assert abs(z_mean) < 4.0, f"pair {(i, j)}: z={z_mean:.2f}"
        assert abs(z_var) < 4.0, f"pair {(i, j)}: z={z_var:.2f}"
    print("   ✅ Log-ratio increments passed")


def test_halving_dt_keeps_estimates_within_error():
    """Integrator bias: the 64-seed co-occurrence estimate moves by less than its Monte Carlo error."""
    print("🧪 Testing estimates under a halved step...")

    estimates = []
    for dt in (0.02, 0.01):
        summaries = batch_simulate(MATCHING, SimConfig(t_final=100.0, dt=dt), n_runs=64, seed_base=77, burn_in=5.0)
        p11 = np.array([s.cooccurrence[0, 0] for s in summaries])
        estimates.append((p11.mean(), p11.std(ddof=1) / np.sqrt(p11.size)))

    (coarse, se_coarse), (fine, se_fine) = estimates
    combined = np.hypot(se_coarse, se_fine)
    assert abs(coarse - fine) < 4.0 * combined, f"{coarse:.4f} vs {fine:.4f} (se {combined:.4f})"
    print(f"   ✅ Halved step passed ({coarse:.4f} vs {fine:.4f})")


def test_trajectory_keeps_caller_arrays_writable():
    print("🧪 Testing Trajectory input ownership...")

    times = np.array([0.0, 0.5, 1.0])
    log_pop = np.zeros((3, 2))
    traj = Trajectory(times=times, log_pop=log_pop)
    assert times.flags.writeable and log_pop.flags.writeable
    log_pop[1, 0] = -3.0
    assert traj.log_pop[1, 0] == 0.0
    assert not traj.times.flags.writeable and not traj.states.flags.writeable
    print("   ✅ Trajectory input ownership passed")


def run_all_tests():
    """Run all simulation tests."""
    import tempfile
    from pathlib import Path

    print("\n" + "=" * 60)
    print("🧪 SIMULATION TESTS")
    print("=" * 60 + "\n")

    test_sim_config_validation()
    test_record_steps()
    test_trajectory_shape_and_simplex()
    test_simulation_is_deterministic()
    test_small_noise_tracks_rk4()
    test_rk4_conserves_product_on_neutral_cycle()
    test_rk4_rest_point_and_convergence()
    test_non_finite_state_raises()
    test_derive_seed()
    test_batch_order_and_worker_independence()
    with tempfile.TemporaryDirectory() as tmp:
        test_write_trajectory_csv(Path(tmp))
    test_from_states_copies_input()
    test_log_ratio_noise_is_exact()
    test_halving_dt_keeps_estimates_within_error()
    test_trajectory_keeps_caller_arrays_writable()

    print("\n" + "=" * 60)
    print("🎉 ALL SIMULATION TESTS PASSED!")
    print("=" * 60 + "\n")


if __name__ == "__main__":
    run_all_tests()
