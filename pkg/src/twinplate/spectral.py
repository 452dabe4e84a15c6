"""Dense eigenvalue analysis of the coupled generator.

Eigenvalues are computed from the energy-similarity transform T = S A S^{-1},
which is skew-symmetric when the damping vanishes; working in that geometry
keeps the real parts of undamped eigenvalues at round-off level even for
stiff grids, where the raw block matrix would smear them by many orders of
magnitude.

The discrete spectrum mirrors the continuous one only in its resolved band.
Near the top of the discrete frequency range the density of states blows up
and damped combinations can localize away from the damping region, producing
spurious barely-damped modes; ``SpectrumReport.abscissa_within`` restricts
attention to frequencies below a cap for that reason.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DenseCapError
from .generator import CoupledGenerator, EnergyForm

__all__ = ["SpectrumReport", "eigenvalues", "spectral_abscissa", "axis_clearance"]

DEFAULT_DENSE_CAP = 4000


@dataclass(frozen=True)
class SpectrumReport:
    """Full spectrum with the axis diagnostics derived from it."""

    eigenvalues: np.ndarray
    axis_tol: float

    @property
    def abscissa(self) -> float:
        """Largest real part over the whole spectrum."""
        return float(np.max(self.eigenvalues.real))

    @property
    def clearance(self) -> float:
        """Smallest distance of any eigenvalue from the imaginary axis."""
        return float(np.min(np.abs(self.eigenvalues.real)))

    @property
    def axis_count(self) -> int:
        """Eigenvalues with |Re| below the axis tolerance."""
        return int(np.sum(np.abs(self.eigenvalues.real) < self.axis_tol))

    @property
    def all_decaying(self) -> bool:
        return bool(np.all(self.eigenvalues.real < -self.axis_tol))

    def abscissa_within(self, frequency_cap: float) -> float:
        """Largest real part among eigenvalues with |Im| <= frequency_cap.

        This is the physically meaningful abscissa: it excludes the
        band-edge artifacts that live above the resolved band.
        """
        mask = np.abs(self.eigenvalues.imag) <= frequency_cap
        if not mask.any():
            raise ValueError(f"no eigenvalues below frequency cap {frequency_cap}")
        return float(np.max(self.eigenvalues.real[mask]))


def eigenvalues(
    gen: CoupledGenerator,
    form: EnergyForm,
    dense_cap: int = DEFAULT_DENSE_CAP,
    axis_tol: float | None = None,
) -> SpectrumReport:
    """Full dense spectrum of the generator in the energy geometry.

    Refuses problems above ``dense_cap`` total unknowns; resolvent sweeps
    are the diagnostic that scales past that point.
    """
    dim = gen.dimension
    if dim > dense_cap:
        raise DenseCapError(
            f"dense eigensolve needs 4*ndof <= {dense_cap}, got {dim}; "
            "use resolvent sweeps for larger problems"
        )
    t = form.factor @ (gen.matrix @ form.factor_inverse_dense())
    vals = sla.eigvals(np.asarray(t))
    order = np.lexsort((np.abs(vals.imag), -vals.real))
    vals = vals[order]
    if axis_tol is None:
        scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
        axis_tol = 1e-10 * scale
    return SpectrumReport(eigenvalues=vals, axis_tol=float(axis_tol))


def spectral_abscissa(report: SpectrumReport) -> float:
    if report.eigenvalues.size == 0:
        raise ValueError("empty spectrum")
    return report.abscissa


def axis_clearance(report: SpectrumReport, tol: float | None = None) -> tuple[float, int]:
    """(min |Re|, count of eigenvalues with |Re| < tol)."""
    if report.eigenvalues.size == 0:
        raise ValueError("empty spectrum")
    if tol is None:
        tol = report.axis_tol
    count = int(np.sum(np.abs(report.eigenvalues.real) < tol))
    return report.clearance, count
