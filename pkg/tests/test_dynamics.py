import math

import numpy as np
import pytest

from ising_mcp.dynamics import (TWO_PI, AnnealSchedule, IntegratorConfig, ModelKind, PhaseState, energy_gradient,
                                energy_rate, fixed_point_energy, integrate, model_energy, model_rhs,
                                phases_from_spins, random_phases, read_trajectory_csv, round_to_spins,
                                wrap_phases, write_trajectory_csv)
from ising_mcp.errors import DimensionError, IntegrationError, IsingError
from ising_mcp.graph import couplings, generate_random_graph
from ising_mcp.stability import TypeIFixedPoint

MODELS = [ModelKind.DIM, ModelKind.OIM]


def central_difference(f, x, h=1e-6):
    grad = np.empty_like(x)
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = h
        grad[k] = (f(x + step) - f(x - step)) / (2 * h)
    return grad


@pytest.mark.parametrize("model", MODELS)
def test_energy_gradient_is_minus_twice_the_rhs(model, rng):
    for sample in range(50):
        n = int(rng.integers(2, 21))
        m = int(rng.integers(0, n * (n - 1) // 2 + 1))
        J = couplings(generate_random_graph(n, m, seed=sample))
        phi = random_phases(n, rng)
        K, Ks = rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0)
        numeric = central_difference(lambda p: model_energy(model, J, p, K, Ks), phi)
        np.testing.assert_allclose(energy_gradient(model, J, phi, K, Ks), numeric, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("model", MODELS)
def test_energy_rate_is_non_positive(model, rng):
    J = couplings(generate_random_graph(10, 20, seed=3))
    for _ in range(10):
        phi = random_phases(10, rng)
        rate = energy_rate(model, J, phi, 1.0, 0.7)
        rhs = model_rhs(model, J, phi, 1.0, 0.7)
        assert rate <= 0.0
        assert rate == pytest.approx(-2.0 * float(rhs @ rhs))


@pytest.mark.parametrize("model", MODELS)
def test_rhs_vanishes_exactly_on_type_one_points(model, rng):
    for seed in range(10):
        n = int(rng.integers(2, 16))
        J = couplings(generate_random_graph(n, n * (n - 1) // 3, seed=seed))
        K, Ks = rng.uniform(0.1, 5.0), rng.uniform(0.0, 5.0)
        for _ in range(100):
            s = rng.choice([-1, 1], size=n)
            assert np.all(model_rhs(model, J, phases_from_spins(s), K, Ks) == 0.0)
        for fp in (TypeIFixedPoint.half_pi(n), TypeIFixedPoint(np.full(n, 3))):
            assert np.all(model_rhs(model, J, fp.phis, K, Ks) == 0.0)


def test_two_node_rhs_by_hand(two_node):
    J = couplings(two_node)
    phi = np.array([0.3, 1.1])
    dim = model_rhs(ModelKind.DIM, J, phi, 2.0, 0.5)
    oim = model_rhs(ModelKind.OIM, J, phi, 2.0, 0.5)
    # J_01 = -1
    np.testing.assert_allclose(dim, 2.0 * math.sin(1.4) - 0.5 * np.sin(2 * phi))
    np.testing.assert_allclose(oim, 2.0 * np.array([math.sin(-0.8), math.sin(0.8)]) - 0.5 * np.sin(2 * phi))


@pytest.mark.parametrize("model", MODELS)
def test_fixed_point_energy_matches_model_energy(model, rng):
    g = generate_random_graph(9, 15, seed=2)
    J = couplings(g)
    for _ in range(20):
        s = rng.choice([-1, 1], size=9)
        assert model_energy(model, J, phases_from_spins(s), 1.3, 0.4) == pytest.approx(
            fixed_point_energy(J, s, 1.3, 0.4))


def test_noise_free_descent_at_constant_ks(rng):
    J = couplings(generate_random_graph(15, 56, seed=11))
    sched = AnnealSchedule.constant(K=1.0, Ks=0.5, t_end=5.0)
    cfg = IntegratorConfig(dt=0.01, noise_amplitude=0.0, record_stride=1)
    for model in MODELS:
        for _ in range(20):
            traj = integrate(model, J, random_phases(15, rng), sched, cfg)
            assert np.all(np.diff(traj.energies) <= 1e-9)


def test_schedule_ramp():
    sched = AnnealSchedule.linear_ramp(K=1.0, ks_max=4.0, t_end=20.0)
    assert sched.ks(0.0) == 0.0
    assert sched.ks(10.0) == pytest.approx(2.0)
    assert sched.ks(20.0) == 4.0
    assert sched.ks(30.0) == 4.0
    np.testing.assert_allclose(sched.ks(np.array([5.0, 15.0])), [1.0, 3.0])
    assert AnnealSchedule.from_dict(sched.to_dict()) == sched


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(K=0.0, ks_points=((0.0, 1.0),), total_time=1.0),
        dict(K=1.0, ks_points=(), total_time=1.0),
        dict(K=1.0, ks_points=((1.0, 0.0), (1.0, 2.0)), total_time=1.0),
        dict(K=1.0, ks_points=((0.0, -1.0),), total_time=1.0),
        dict(K=1.0, ks_points=((0.0, 1.0),), total_time=0.0),
    ],
)
def test_schedule_validation(kwargs):
    with pytest.raises(IsingError):
        AnnealSchedule(**kwargs)


def test_integrator_config_validation():
    with pytest.raises(IsingError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(IsingError):
        IntegratorConfig(noise_amplitude=-1.0)
    with pytest.raises(IsingError):
        IntegratorConfig(record_stride=0)


def test_integrate_records_every_stride(triangle):
    J = couplings(triangle)
    sched = AnnealSchedule.linear_ramp(K=1.0, ks_max=1.0, t_end=1.0)
    traj = integrate(ModelKind.DIM, J, np.zeros(3), sched, IntegratorConfig(dt=0.01, record_stride=10))
    assert len(traj) == 11
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(1.0)
    np.testing.assert_allclose(traj.ks_values, traj.times)
    assert traj.final_state.t == pytest.approx(1.0)
    assert np.all((traj.phases >= 0.0) & (traj.phases < TWO_PI))


def test_integrate_is_seeded(triangle, rng):
    J = couplings(triangle)
    phi0 = random_phases(3, rng)
    sched = AnnealSchedule.linear_ramp(K=1.0, ks_max=2.0, t_end=2.0)
    a = integrate(ModelKind.OIM, J, phi0, sched, IntegratorConfig(seed=5))
    b = integrate(ModelKind.OIM, J, phi0, sched, IntegratorConfig(seed=5))
    c = integrate(ModelKind.OIM, J, phi0, sched, IntegratorConfig(seed=6))
    np.testing.assert_array_equal(a.phases, b.phases)
    assert not np.array_equal(a.phases, c.phases)


def test_integrate_reports_the_failing_step(triangle):
    J = couplings(triangle)
    sched = AnnealSchedule.constant(K=float("inf"), Ks=0.0, t_end=1.0)
    with np.errstate(all="ignore"), pytest.raises(IntegrationError) as err:
        integrate(ModelKind.DIM, J, np.array([0.1, 0.5, 0.9]), sched, IntegratorConfig(noise_amplitude=0.0))
    assert err.value.step == 1


def test_integrate_checks_dimensions(triangle):
    sched = AnnealSchedule.constant(K=1.0, Ks=0.0, t_end=1.0)
    with pytest.raises(DimensionError):
        integrate(ModelKind.DIM, couplings(triangle), np.zeros(4), sched, IntegratorConfig())


def test_round_to_spins():
    phi = np.array([0.0, math.pi, math.pi / 2, 0.1, 6.2, 2.0, -0.1])
    np.testing.assert_array_equal(round_to_spins(phi), [1, -1, 1, 1, 1, -1, 1])
    np.testing.assert_array_equal(round_to_spins(phases_from_spins([1, -1, -1])), [1, -1, -1])
    assert round_to_spins(math.pi / 2) == 1
    assert round_to_spins(3.0) == -1


def test_wrap_phases():
    wrapped = wrap_phases([-0.5, 7.0, TWO_PI, -1e-18])
    assert np.all((wrapped >= 0.0) & (wrapped < TWO_PI))
    assert wrapped[0] == pytest.approx(TWO_PI - 0.5)
    assert wrapped[1] == pytest.approx(7.0 - TWO_PI)
    assert PhaseState(phi=np.array([7.0])).phi[0] == pytest.approx(7.0 - TWO_PI)
    assert wrap_phases(-1e-18) == 0.0
    assert wrap_phases(7.0) == pytest.approx(7.0 - TWO_PI)


def test_trajectory_csv(tmp_path, triangle):
    J = couplings(triangle)
    sched = AnnealSchedule.linear_ramp(K=1.0, ks_max=1.0, t_end=0.5)
    traj = integrate(ModelKind.DIM, J, np.array([0.1, 0.2, 0.3]), sched, IntegratorConfig(seed=1))
    path = tmp_path / "trace.csv"
    write_trajectory_csv(traj, path)
    assert path.read_text().splitlines()[0] == "t,Ks,E,phi_0,phi_1,phi_2"
    back = read_trajectory_csv(path)
    np.testing.assert_array_equal(back.phases, traj.phases)
    np.testing.assert_array_equal(back.ks_values, traj.ks_values)
    np.testing.assert_array_equal(back.energies, traj.energies)
