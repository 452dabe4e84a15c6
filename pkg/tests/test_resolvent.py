"""Resolvent norms, sweeps, fits, and boundedness checks.

Oracles: the undamped generator is normal in the energy geometry, so its
resolvent norm is exactly the reciprocal distance to the spectrum; at small
sizes the dense SVD of the transformed pencil checks the iterative path.
"""

import numpy as np
import pytest
import scipy.linalg as sla

from twinplate.damping import indicator_profile, zero_profile
from twinplate.errors import AxisEigenvalueError, InvalidParameterError
from twinplate.generator import assemble_generator
from twinplate.mesh import build_grid_1d
from twinplate.resolvent import (
    SweepResult,
    fit_exponent,
    fit_exponent_points,
    gevrey_bound_check,
    resolved_frequency_cap,
    resolvent_norm,
    resolvent_norm_dense,
    sweep,
    uniform_bound_check,
)


def undamped(n=24):
    grid = build_grid_1d(n)
    return assemble_generator(grid, 1.0, 2.0, zero_profile(grid))


def damped(n=24, d=1.0, c=2.0):
    grid = build_grid_1d(n)
    return assemble_generator(grid, d, c, indicator_profile((0.7, 1.0), 1.0, grid))


def undamped_frequencies(gen):
    nu = np.sort(sla.eigvalsh(gen.biharmonic.toarray()))
    return np.sort(np.concatenate([np.sqrt(gen.d * nu), np.sqrt(gen.c * nu)]))


def test_undamped_norm_is_reciprocal_distance():
    gen, form = undamped()
    freqs = undamped_frequencies(gen)
    spectrum = np.concatenate([1j * freqs, -1j * freqs])
    # shifts halfway between distinct consecutive frequencies
    gaps = np.nonzero(np.diff(freqs) > 1e-6 * freqs[:-1])[0]
    for idx in gaps[:6]:
        lam = 0.5 * (freqs[idx] + freqs[idx + 1])
        norm = resolvent_norm(gen, form, lam)
        dist = np.min(np.abs(1j * lam - spectrum))
        assert abs(norm * dist - 1.0) <= 1e-6


@pytest.mark.parametrize("n, lam", [(12, 3.0), (24, 57.0), (30, 311.0), (30, 2.0e3)])
def test_iterative_matches_dense_oracle(n, lam):
    gen, form = damped(n=n)
    iterative = resolvent_norm(gen, form, lam)
    dense = resolvent_norm_dense(gen, form, lam)
    assert abs(iterative - dense) <= 1e-6 * dense


def test_static_norm_matches_inverse():
    gen, form = damped(n=20)
    norm0 = resolvent_norm(gen, form, 0.0)
    dense0 = resolvent_norm_dense(gen, form, 0.0)
    assert norm0 == pytest.approx(dense0, rel=1e-6)


def test_axis_hit_is_not_silently_smoothed():
    # equal speeds leave undamped modes on the axis; shifting exactly onto
    # one must either raise or return an astronomically large norm
    grid = build_grid_1d(8)
    gen, form = assemble_generator(grid, 1.0, 1.0,
                                   indicator_profile((0.7, 1.0), 1.0, grid))
    freqs = undamped_frequencies(gen)
    try:
        norm = resolvent_norm(gen, form, float(freqs[0]))
    except AxisEigenvalueError:
        return
    assert norm > 1e9


def test_fit_exact_power_law():
    lams = np.geomspace(1.0, 1e4, 30)
    norms = lams**-0.4
    fit = fit_exponent_points(lams, norms, (1.0, 1e4))
    assert fit.gamma == pytest.approx(0.4, abs=1e-12)
    assert fit.prefactor == pytest.approx(1.0, rel=1e-12)
    assert fit.residual <= 1e-13
    assert fit.trusted


def test_fit_needs_six_samples():
    lams = np.geomspace(1.0, 100.0, 12)
    with pytest.raises(InvalidParameterError):
        fit_exponent_points(lams, np.ones(12), (90.0, 100.0))


def test_sweep_preconditions():
    gen, form = damped(n=10)
    with pytest.raises(InvalidParameterError):
        sweep(gen, form, 10.0, 100.0, points=4)
    with pytest.raises(InvalidParameterError):
        sweep(gen, form, 100.0, 10.0, points=10)


def test_sweep_undamped_matches_distance_per_point():
    gen, form = undamped(n=12)
    freqs = undamped_frequencies(gen)
    spectrum = np.concatenate([1j * freqs, -1j * freqs])
    result = sweep(gen, form, 10.0, 100.0, points=8)
    for lam, norm in zip(result.lambdas, result.norms):
        dist = np.min(np.abs(1j * lam - spectrum))
        assert abs(norm * dist - 1.0) <= 1e-6


def test_sweep_damped_all_finite_and_refit():
    gen, form = damped(n=30)
    result = sweep(gen, form, 1.0, 1e3, points=12)
    assert np.all(np.isfinite(result.norms))
    refit = fit_exponent(result, (10.0, 1e3))
    assert refit.fit.band == (10.0, 1e3)


def test_sweep_grid_refinement_self_consistency():
    # doubling the shift grid must not move the interpolated curve by more
    # than a few percent where the grid already resolves the curve; samples
    # sitting on narrow resonance peaks are excluded by a local smoothness
    # gate on the fine grid
    gen, form = damped(n=40)
    band = (5e3, 5e4)
    coarse = sweep(gen, form, band[0], band[1], points=25, fit_band=band)
    fine = sweep(gen, form, band[0], band[1], points=49, fit_band=band)
    log_fine = np.log(fine.norms)
    curvature = np.full(49, np.inf)
    curvature[1:-1] = np.abs(np.diff(log_fine, 2))
    interp = np.exp(np.interp(np.log(fine.lambdas), np.log(coarse.lambdas),
                              np.log(coarse.norms)))
    new_points = np.arange(1, 48, 2)  # fine samples between coarse ones
    resolved = new_points[curvature[new_points] < 0.05]
    assert resolved.size >= 8
    deviation = np.abs(interp[resolved] - fine.norms[resolved]) / fine.norms[resolved]
    assert np.max(deviation) < 0.05


def test_parallel_sweep_matches_serial():
    gen, form = damped(n=20)
    serial = sweep(gen, form, 10.0, 500.0, points=8, workers=1)
    parallel = sweep(gen, form, 10.0, 500.0, points=8, workers=2)
    np.testing.assert_array_equal(serial.norms, parallel.norms)


def test_gevrey_check_on_synthetic_decay():
    lams = np.geomspace(1e2, 1e4, 24)
    fit = fit_exponent_points(lams, lams**-0.5, (1e2, 1e4))
    result = SweepResult(lams, lams**-0.5, (1e2, 1e4), fit, resolved_cap=1e5)
    check = gevrey_bound_check(result)
    assert check.bounded  # lambda^{0.4-0.5} decays, upper half smaller
    growing = SweepResult(lams, lams**0.2, (1e2, 1e4), fit, resolved_cap=1e5)
    assert not gevrey_bound_check(growing).bounded  # 0.6 net growth across band


def test_uniform_check_flags_growth_and_decay():
    lams = np.geomspace(1.0, 1e4, 24)
    fit = fit_exponent_points(lams, lams**-0.4, (1.0, 1e4))
    decaying = SweepResult(lams, lams**-0.4, (1.0, 1e4), fit, resolved_cap=1e5)
    check = uniform_bound_check(decaying, static_norm=2.0)
    assert check.bounded
    assert check.sup_norm == 2.0
    growing = SweepResult(lams, lams**0.4, (1.0, 1e4), fit, resolved_cap=1e5)
    assert not uniform_bound_check(growing).bounded


def test_resolved_cap_scaling():
    gen_small, _ = damped(n=20)
    gen_large, _ = damped(n=40)
    # halving h quadruples the top frequency, and the cap with it
    ratio = resolved_frequency_cap(gen_large) / resolved_frequency_cap(gen_small)
    assert 3.0 < ratio < 5.0
