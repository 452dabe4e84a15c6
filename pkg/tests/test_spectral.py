"""Spectrum computations: undamped oracle, conjugate pairing, abscissa."""

import numpy as np
import pytest
import scipy.linalg as sla

from twinplate.damping import indicator_profile, zero_profile
from twinplate.errors import DenseCapError
from twinplate.generator import assemble_generator
from twinplate.mesh import build_grid_1d
from twinplate.spectral import SpectrumReport, axis_clearance, eigenvalues, spectral_abscissa


def undamped(n=40, d=1.0, c=2.0):
    grid = build_grid_1d(n)
    return assemble_generator(grid, d, c, zero_profile(grid))


def damped(n=40, d=1.0, c=2.0, a0=1.0):
    grid = build_grid_1d(n)
    return assemble_generator(grid, d, c, indicator_profile((0.7, 1.0), a0, grid))


def test_undamped_spectrum_purely_imaginary():
    gen, form = undamped()
    report = eigenvalues(gen, form)
    assert np.max(np.abs(report.eigenvalues.real)) <= 1e-10
    assert abs(report.abscissa) <= 1e-10


def test_undamped_moduli_match_dispersion():
    # moduli must be sqrt(d nu_k) and sqrt(c nu_k), nu_k from an independent
    # dense eigensolve of B itself
    gen, form = undamped(n=24, d=1.0, c=2.0)
    nu = np.sort(sla.eigvalsh(gen.biharmonic.toarray()))
    expected = np.sort(np.concatenate([np.sqrt(1.0 * nu), np.sqrt(2.0 * nu)]))
    moduli = np.sort(np.abs(eigenvalues(gen, form).eigenvalues))[::2]  # one per pair
    np.testing.assert_allclose(moduli, expected, rtol=1e-8)


def test_spectrum_conjugate_pairing():
    gen, form = damped(n=30)
    ev = eigenvalues(gen, form).eigenvalues
    upper = np.sort_complex(ev[ev.imag > 1e-9])
    lower = np.sort_complex(np.conj(ev[ev.imag < -1e-9]))
    scale = np.max(np.abs(ev))
    assert upper.size == lower.size
    np.testing.assert_allclose(upper, lower, atol=1e-9 * scale)


def test_spectrum_in_closed_left_half_plane():
    for builder in (undamped, damped):
        gen, form = builder(n=30)
        ev = eigenvalues(gen, form).eigenvalues
        scale = max(1.0, float(np.max(np.abs(ev))))
        assert np.max(ev.real) <= 1e-9 * scale


def test_equal_speed_axis_modes():
    # with c = d the difference subsystem is undamped: half the spectrum
    # stays on the axis
    gen, form = damped(n=20, d=1.0, c=1.0)
    report = eigenvalues(gen, form)
    kappa, count = axis_clearance(report, tol=1e-10)
    assert kappa <= 1e-10
    assert count >= 2 * gen.ndof


def test_distinct_speeds_clear_the_axis():
    gen, form = damped(n=40)
    report = eigenvalues(gen, form)
    assert report.abscissa < 0
    kappa, count = axis_clearance(report, tol=1e-10)
    assert kappa > 0
    assert count == 0


def test_damped_abscissa_negative_at_n80():
    gen, form = damped(n=80)
    report = eigenvalues(gen, form)
    assert spectral_abscissa(report) < 0


def test_abscissa_of_fixed_spectrum():
    report = SpectrumReport(np.array([-1 + 2j, -1 - 2j, -3 + 0j]), axis_tol=1e-10)
    assert spectral_abscissa(report) == -1.0
    kappa, count = axis_clearance(report)
    assert kappa == 1.0
    assert count == 0


def test_dense_cap_refusal():
    gen, form = damped(n=40)
    with pytest.raises(DenseCapError):
        eigenvalues(gen, form, dense_cap=100)


def test_abscissa_within_band():
    gen, form = damped(n=60)
    report = eigenvalues(gen, form)
    cap = 0.1 * gen.max_frequency
    banded = report.abscissa_within(cap)
    assert banded <= report.abscissa + 1e-12
    inside = np.abs(report.eigenvalues.imag) <= cap
    assert banded == np.max(report.eigenvalues.real[inside])
