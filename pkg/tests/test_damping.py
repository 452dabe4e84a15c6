"""Damping profile construction and validation tests."""

import numpy as np
import pytest

from twinplate.damping import (
    gc_preset_1d,
    indicator_profile,
    smooth_bump_profile,
    validate_coercive,
    validate_structural,
    zero_profile,
)
from twinplate.errors import InvalidSupportError, NotApplicableError
from twinplate.mesh import build_grid_1d


@pytest.fixture
def grid():
    return build_grid_1d(9)


def test_indicator_full_support(grid):
    profile = indicator_profile((0.0, 1.0), 1.0, grid)
    assert np.all(profile.node_values == 1.0)
    assert np.all(profile.midpoint_values == 1.0)


def test_indicator_membership(grid):
    profile = indicator_profile((0.7, 1.0), 2.0, grid)
    x = grid.nodes()
    expected = np.where(x > 0.7, 2.0, 0.0)
    np.testing.assert_array_equal(profile.node_values, expected)
    # only x = 0.8 and 0.9 are inside
    assert np.count_nonzero(profile.node_values) == 2


def test_indicator_rejects_bad_support(grid):
    with pytest.raises(InvalidSupportError):
        indicator_profile((2.0, 3.0), 1.0, grid)
    with pytest.raises(InvalidSupportError):
        indicator_profile((0.5, 0.5), 1.0, grid)


def test_indicator_values_are_two_level(grid):
    profile = indicator_profile((0.3, 0.8), 1.7, grid)
    assert set(np.unique(profile.node_values)) <= {0.0, 1.7}
    assert set(np.unique(profile.midpoint_values)) <= {0.0, 1.7}


def test_smooth_bump_plateau_and_outside(grid):
    profile = smooth_bump_profile((0.6, 1.0), 2.5, 0.15, grid)
    plateau_x = np.array([0.8, 0.9, 0.99])
    np.testing.assert_allclose(profile(plateau_x), 2.5, rtol=1e-14)
    assert np.all(profile(plateau_x, order=1) == 0.0)
    assert np.all(profile(plateau_x, order=2) == 0.0)
    outside_x = np.array([0.1, 0.5, 0.6])
    assert np.all(profile(outside_x) == 0.0)
    assert np.all(profile(outside_x, order=1) == 0.0)
    assert np.all(profile(outside_x, order=2) == 0.0)


def test_smooth_bump_ramp_midpoint_value(grid):
    # halfway up the ramp the smoothstep is exactly 1/2, so a = a0/16
    profile = smooth_bump_profile((0.6, 1.0), 1.0, 0.15, grid)
    mid = 0.6 + 0.075
    assert profile(np.array([mid]))[0] == pytest.approx(0.5**4, rel=1e-13)


def test_smooth_bump_rejects_wide_ramp(grid):
    with pytest.raises(InvalidSupportError):
        smooth_bump_profile((0.6, 0.8), 1.0, 0.15, grid)


def test_smooth_bump_derivatives_match_differencing(grid):
    # closed-form derivatives against central differences at fixed points
    # strictly inside one ramp (the profile is polynomial there); halving
    # the difference step must shrink the error by the O(h^2) factor 4
    profile = smooth_bump_profile((0.3, 0.9), 1.0, 0.2, grid)
    points = np.array([0.35, 0.41, 0.46, 0.74, 0.82])

    def fd_error(h):
        d1 = (profile(points + h) - profile(points - h)) / (2 * h)
        d2 = (profile(points + h) - 2 * profile(points) + profile(points - h)) / h**2
        return (np.max(np.abs(d1 - profile(points, order=1))),
                np.max(np.abs(d2 - profile(points, order=2))))

    coarse = fd_error(2e-3)
    fine = fd_error(1e-3)
    for c, f in zip(coarse, fine):
        assert 3.6 < c / f < 4.4


def test_profiles_nonnegative_everywhere():
    grid = build_grid_1d(31)
    x = np.linspace(0.0, 1.0, 10001)
    profiles = [
        zero_profile(grid),
        indicator_profile(gc_preset_1d("right-collar"), 1.0, grid),
        indicator_profile(gc_preset_1d("both-collars"), 0.5, grid),
        smooth_bump_profile((0.6, 1.0), 1.0, 0.15, grid),
        smooth_bump_profile(((0.0, 0.3), (0.7, 1.0)), 2.0, 0.1, grid),
    ]
    for profile in profiles:
        assert np.all(profile(x) >= 0.0)
        assert np.all(profile.node_values >= 0.0)
        assert np.all(profile.midpoint_values >= 0.0)


def test_structural_constant_profile(grid):
    profile = smooth_bump_profile((0.0, 1.0), 3.0, 0.1, grid)
    report = validate_structural(profile)
    assert report.m1 == 0.0
    assert report.m2 == 0.0
    assert report.passed


def test_structural_rejects_indicator(grid):
    profile = indicator_profile((0.7, 1.0), 1.0, grid)
    with pytest.raises(NotApplicableError):
        validate_structural(profile)


def test_structural_bump_finite_and_stable(grid):
    profile = smooth_bump_profile((0.6, 1.0), 1.0, 0.15, grid)
    report = validate_structural(profile, samples=10001)
    assert report.passed
    assert np.isfinite(report.m1) and report.m1 > 0
    assert np.isfinite(report.m2) and report.m2 > 0
    refined = validate_structural(profile, samples=20001)
    assert refined.m1 == pytest.approx(report.m1, rel=0.05)
    assert refined.m2 == pytest.approx(report.m2, rel=0.05)


def test_structural_bump_matches_elementary_bound(grid):
    # for a = a0 g^4: |a'|^4/a^3 = 256 a0 g'^4 pointwise, so the measured
    # supremum cannot exceed 256 a0 max(g')^4 with max g' = 1.875/tau
    a0, tau = 1.0, 0.15
    profile = smooth_bump_profile((0.6, 1.0), a0, tau, grid)
    report = validate_structural(profile)
    bound = 256.0 * a0 * (1.875 / tau) ** 4
    assert report.m1 <= bound * (1 + 1e-9)
    assert report.m1 >= 0.9 * bound  # sampling must actually see the ramp peak


def test_coercive_checks(grid):
    indicator = indicator_profile((0.7, 1.0), 1.0, grid)
    assert validate_coercive(indicator, grid, 1.0)
    assert not validate_coercive(indicator, grid, 1.5)
    assert not validate_coercive(zero_profile(grid), grid, 0.5)
    bump = smooth_bump_profile((0.6, 1.0), 1.0, 0.15, build_grid_1d(49))
    assert validate_coercive(bump, build_grid_1d(49), 1.0)


def test_gc_presets():
    assert gc_preset_1d("right-collar") == (0.7, 1.0)
    assert gc_preset_1d("both-collars") == ((0.0, 0.3), (0.7, 1.0))
    assert gc_preset_1d("full") == (0.0, 1.0)
    with pytest.raises(InvalidSupportError):
        gc_preset_1d("left-collar")


def test_union_support_profile(grid):
    profile = indicator_profile(((0.0, 0.3), (0.7, 1.0)), 1.0, grid)
    x = grid.nodes()
    inside = (x < 0.3) | (x > 0.7)
    np.testing.assert_array_equal(profile.node_values > 0, inside)
