"""Per-mode analysis of the globally damped comparison model.

Everything here is 4x4 dense algebra, so the module is its own oracle; the
tests pin the undamped dispersion, the exact dissipation identity, the
truncation behavior, and the fitted exponent table.
"""

import numpy as np
import pytest
import scipy.linalg as sla

from twinplate.abstract_modes import (
    AbstractConfig,
    abstract_resolvent_norm,
    mode_generator,
    mode_peak,
    theta_exponent_sweep,
)
from twinplate.errors import AxisEigenvalueError, InvalidParameterError


def test_undamped_block_dispersion():
    config = AbstractConfig(a=1.0, b=2.0, gamma=0.0, theta=0.5)
    block = mode_generator(np.pi**4, config)
    ev = np.sort_complex(sla.eigvals(block.matrix))
    expected = np.sort_complex(np.array(
        [1j * np.pi**2, -1j * np.pi**2,
         1j * np.sqrt(2) * np.pi**2, -1j * np.sqrt(2) * np.pi**2]))
    np.testing.assert_allclose(ev, expected, atol=1e-10)


def test_damped_block_eigenvalues_decay():
    config = AbstractConfig(a=1.0, b=2.0, gamma=1.0, theta=0.5)
    ev = sla.eigvals(mode_generator(np.pi**4, config).matrix)
    assert np.all(ev.real < 0.0)


def test_block_dissipation_identity_exact():
    rng = np.random.default_rng(0)
    for theta in (-0.5, 0.0, 0.25, 0.5, 0.75, 1.0):
        config = AbstractConfig(a=1.0, b=2.0, gamma=1.3, theta=theta)
        for k in (1, 3, 7):
            block = mode_generator(config.mode_eigenvalue(k), config)
            for _ in range(100 // 3):
                X = rng.standard_normal(4) + 1j * rng.standard_normal(4)
                lhs = block.energy_inner(block.matrix @ X, X).real
                rhs = -block.dissipation_rate(X, config)
                scale = block.energy_inner(X, X).real
                assert abs(lhs - rhs) <= 1e-13 * scale


def test_mode_generator_rejects_nonpositive_mu():
    with pytest.raises(InvalidParameterError):
        mode_generator(0.0, AbstractConfig())


def test_undamped_norm_is_reciprocal_distance():
    config = AbstractConfig(a=1.0, b=2.0, gamma=0.0, theta=0.5)
    freqs = []
    for k in range(1, 40):
        mu = config.mode_eigenvalue(k)
        freqs += [np.sqrt(mu), np.sqrt(2 * mu)]
    freqs = np.sort(freqs)
    lam = 0.5 * (freqs[6] + freqs[7])
    norm = abstract_resolvent_norm(config, lam)
    dist = np.min(np.abs(lam - freqs))
    assert norm * dist == pytest.approx(1.0, rel=1e-9)


def test_norm_prefactor_stable_at_half():
    # analytic regime: lambda * norm approaches a constant
    config = AbstractConfig()
    values = [lam * abstract_resolvent_norm(config, lam)
              for lam in (1e3, 1e4, 1e5, 1e6)]
    assert max(values) / min(values) < 1.3


def test_truncation_converged():
    config = AbstractConfig(theta=0.25)
    for lam in (1e2, 1e4, 1e6):
        loose = abstract_resolvent_norm(config, lam, rel_tol=1e-3)
        tight = abstract_resolvent_norm(config, lam, rel_tol=1e-5)
        assert loose == pytest.approx(tight, rel=2e-3)


def test_equal_speeds_axis_hit():
    config = AbstractConfig(a=1.0, b=1.0, gamma=1.0, theta=0.5)
    q_frequency = float(np.sqrt(config.mode_eigenvalue(3)))
    with pytest.raises(AxisEigenvalueError):
        abstract_resolvent_norm(config, q_frequency)


def test_equal_speeds_rejected_by_sweep():
    config = AbstractConfig(a=1.0, b=1.0)
    with pytest.raises(InvalidParameterError):
        theta_exponent_sweep(config, [0.5])


def test_mode_peak_sits_near_light_branch():
    config = AbstractConfig(theta=0.5)
    lam, value = mode_peak(config, 5)
    ev = sla.eigvals(mode_generator(config.mode_eigenvalue(5), config).matrix)
    assert any(abs(lam - abs(e.imag)) <= 0.1 * abs(e.imag) for e in ev if e.imag)
    assert value > 0


@pytest.mark.parametrize("theta, target, tol", [
    (0.5, 1.00, 0.05),
    (0.25, 0.50, 0.05),
    (0.75, 0.50, 0.05),
    (-0.5, -1.00, 0.10),
])
def test_exponent_table(theta, target, tol):
    config = AbstractConfig(a=1.0, b=2.0, gamma=1.0)
    fit = theta_exponent_sweep(config, [theta], (1e2, 1e6), points=40)[0]
    assert abs(fit.gamma - target) <= tol, fit


def test_exponent_symmetry_across_half():
    config = AbstractConfig(a=1.0, b=2.0, gamma=1.0)
    for theta in (0.25, 0.3, 0.4):
        low = theta_exponent_sweep(config, [theta], (1e2, 1e6), points=40)[0]
        high = theta_exponent_sweep(config, [1.0 - theta], (1e2, 1e6), points=40)[0]
        assert abs(low.gamma - high.gamma) <= 0.07
