"""Midpoint integration: conservation, dissipation bookkeeping, decay fits,
and the equal-speed decomposition."""

import numpy as np
import pytest

from twinplate.damping import indicator_profile, zero_profile
from twinplate.errors import InvalidParameterError
from twinplate.evolution import (
    EnergyTrace,
    default_initial_state,
    default_time_step,
    dissipation_identity_residual,
    equal_speed_split,
    evolve,
    fit_decay_rate,
    plate_energy,
    split_energies,
    telescoped_residual,
)
from twinplate.generator import assemble_generator
from twinplate.mesh import build_grid_1d


def undamped(n=24, d=1.0, c=2.0):
    grid = build_grid_1d(n)
    return assemble_generator(grid, d, c, zero_profile(grid))


def damped(n=24, d=1.0, c=2.0):
    grid = build_grid_1d(n)
    return assemble_generator(grid, d, c, indicator_profile((0.7, 1.0), 1.0, grid))


def test_undamped_energy_constant():
    gen, form = undamped()
    Z0 = default_initial_state(gen, form, seed=1)
    trace = evolve(gen, form, Z0, T=10.0)
    drift = np.max(np.abs(trace.energies - trace.energies[0])) / trace.energies[0]
    assert drift <= 1e-11


def test_damped_energy_monotone():
    gen, form = damped()
    rng = np.random.default_rng(2)
    Z0 = form.random_state(rng)
    trace = evolve(gen, form, Z0, T=1.0)
    slack = 1e-12 * trace.energies[0]
    assert np.all(np.diff(trace.energies) <= slack)


def test_midpoint_second_order_endpoint():
    gen, form = damped(n=16)
    Z0 = default_initial_state(gen, form, n_modes=3, seed=3)
    T = 0.02

    def endpoint(dt):
        trace = evolve(gen, form, Z0, T=T, dt=dt, store_states=True)
        return trace.states[-1]

    dt0 = T / 200
    e1 = np.linalg.norm(endpoint(dt0) - endpoint(dt0 / 2))
    e2 = np.linalg.norm(endpoint(dt0 / 2) - endpoint(dt0 / 4))
    assert 3.5 < e1 / e2 < 4.5


def test_identity_residual_undamped():
    gen, form = undamped(n=12)
    Z0 = default_initial_state(gen, form, seed=4)
    trace = evolve(gen, form, Z0, T=0.5)
    assert dissipation_identity_residual(trace) <= 1e-12


def test_identity_single_step_small_grid():
    gen, form = damped(n=4)
    rng = np.random.default_rng(5)
    Z0 = form.random_state(rng)
    dt = 1e-3
    trace = evolve(gen, form, Z0, T=dt, dt=dt)
    assert len(trace.dissipation) == 1
    assert dissipation_identity_residual(trace) <= 1e-13


def test_identity_accumulated_run():
    gen, form = damped(n=64)
    Z0 = default_initial_state(gen, form, seed=6)
    trace = evolve(gen, form, Z0, T=0.5, dt=0.5 / 4000)
    assert dissipation_identity_residual(trace) <= 1e-10
    assert telescoped_residual(trace) <= 1e-10


def test_fit_decay_synthetic_exponential():
    t = np.linspace(0.0, 5.0, 401)
    trace = EnergyTrace(dt=t[1], times=t, energies=np.exp(-2.0 * t),
                        dissipation=np.zeros(400))
    fit = fit_decay_rate(trace, (0.0, 5.0))
    assert fit.mu == pytest.approx(2.0, abs=1e-10)
    assert fit.c0 == pytest.approx(1.0, rel=1e-10)
    assert fit.residual <= 1e-12


def test_fit_decay_undamped_is_zero():
    gen, form = undamped(n=12)
    Z0 = default_initial_state(gen, form, seed=7)
    trace = evolve(gen, form, Z0, T=2.0)
    fit = fit_decay_rate(trace, (0.0, 2.0))
    assert abs(fit.mu) <= 1e-8


def test_fit_decay_window_validation():
    t = np.linspace(0.0, 1.0, 101)
    trace = EnergyTrace(dt=t[1], times=t, energies=np.exp(-t),
                        dissipation=np.zeros(100))
    with pytest.raises(InvalidParameterError):
        fit_decay_rate(trace, (0.99, 1.0))
    bad = EnergyTrace(dt=t[1], times=t, energies=np.concatenate([[1.0], -np.ones(100)]),
                      dissipation=np.zeros(100))
    with pytest.raises(InvalidParameterError):
        fit_decay_rate(bad, (0.0, 1.0))


def test_split_linearity():
    rng = np.random.default_rng(8)
    Z1 = rng.standard_normal(40)
    Z2 = rng.standard_normal(40)
    p12, q12 = equal_speed_split(Z1 + Z2)
    p1, q1 = equal_speed_split(Z1)
    p2, q2 = equal_speed_split(Z2)
    np.testing.assert_allclose(p12, p1 + p2, rtol=1e-14)
    np.testing.assert_allclose(q12, q1 + q2, rtol=1e-14)


def test_split_energies_add_up_when_speeds_match():
    gen, form = damped(n=16, d=1.0, c=1.0)
    rng = np.random.default_rng(9)
    for _ in range(10):
        Z = form.random_state(rng)
        ep, eq = split_energies(form, gen, Z)
        assert ep + eq == pytest.approx(form.energy(Z), rel=1e-12)


def test_equal_speed_run_conserves_q_energy():
    gen, form = damped(n=32, d=1.0, c=1.0)
    Z0 = default_initial_state(gen, form, seed=10)
    trace = evolve(gen, form, Z0, T=5.0)
    q = trace.q_energies
    assert q is not None  # tracking defaults on for equal speeds
    assert np.max(np.abs(q - q[0])) <= 1e-10 * q[0]
    # p-energy decays strictly over the run while the floor holds
    assert trace.p_energies[-1] < 0.5 * trace.p_energies[0]
    floor = q[0] - 1e-9 * trace.energies[0]
    assert np.min(trace.energies) >= floor


def test_time_reversibility_undamped():
    # negating velocities conjugates the midpoint map to its inverse for the
    # undamped system, so run-flip-run-flip must return the initial state
    gen, form = undamped(n=16)
    n = gen.ndof

    def flip(Z):
        out = Z.copy()
        out[2 * n:] *= -1.0
        return out

    Z0 = default_initial_state(gen, form, seed=11)
    dt = default_time_step(gen)
    forward = evolve(gen, form, Z0, T=200 * dt, dt=dt, store_states=True)
    back = evolve(gen, form, flip(forward.states[-1]), T=200 * dt, dt=dt,
                  store_states=True)
    assert np.linalg.norm(flip(back.states[-1]) - Z0) <= 1e-10 * np.linalg.norm(Z0)


def test_default_initial_state_is_unit_norm_low_mode():
    gen, form = damped(n=40)
    Z0 = default_initial_state(gen, form, n_modes=5, seed=12)
    assert form.norm(Z0) == pytest.approx(1.0, rel=1e-12)
    # spanned by the lowest five stiffness modes: residual after projection
    _, vecs = gen.stiffness_modes(5)
    proj = vecs @ (vecs.T @ Z0.reshape(4, -1).T)
    assert np.linalg.norm(proj - Z0.reshape(4, -1).T) <= 1e-10


def test_plate_energy_definition():
    gen, form = damped(n=12)
    rng = np.random.default_rng(13)
    pos = rng.standard_normal(12)
    vel = rng.standard_normal(12)
    k = form.second_difference
    expected = 0.5 * form.node_weight * (2.0 * np.dot(k @ pos, k @ pos) + np.dot(vel, vel))
    assert plate_energy(form, np.concatenate([pos, vel]), 2.0) == pytest.approx(expected)


def test_evolve_parameter_validation():
    gen, form = damped(n=8)
    Z0 = np.zeros(gen.dimension)
    with pytest.raises(InvalidParameterError):
        evolve(gen, form, Z0, T=-1.0)
    with pytest.raises(InvalidParameterError):
        evolve(gen, form, Z0, T=1.0, dt=2.0)
    with pytest.raises(InvalidParameterError):
        evolve(gen, form, np.zeros(3), T=1.0, dt=0.5)
