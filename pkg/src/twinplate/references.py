"""Independent reference values used to cross-check the discrete operators.

These are computed from closed forms or scalar root finding, never from the
matrices they validate.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "clamped_beam_wavenumber",
    "clamped_beam_eigenvalue",
    "dirichlet_laplacian_eigenvalues",
]


def clamped_beam_wavenumber(k: int) -> float:
    """k-th root beta of cos(beta) cosh(beta) = 1 above zero.

    The clamped-clamped beam frequencies are beta^4.  Roots sit close to
    (k + 1/2) pi; bracketing each in ((k+0.3) pi, (k+0.7) pi) isolates it.
    """
    if k < 1:
        raise ValueError(f"mode index must be >= 1, got {k}")

    def characteristic(b):
        return np.cos(b) * np.cosh(b) - 1.0

    return float(brentq(characteristic, (k + 0.3) * np.pi, (k + 0.7) * np.pi,
                        xtol=1e-13, rtol=1e-15))


def clamped_beam_eigenvalue(k: int) -> float:
    """k-th eigenvalue beta_k^4 of the clamped biharmonic on (0, 1)."""
    return clamped_beam_wavenumber(k) ** 4


def dirichlet_laplacian_eigenvalues(n: int) -> np.ndarray:
    """Eigenvalues of the n-point second-difference Dirichlet Laplacian,
    (2 - 2 cos(k pi h)) / h^2 for k = 1..n with h = 1/(n+1)."""
    h = 1.0 / (n + 1)
    k = np.arange(1, n + 1)
    return (2.0 - 2.0 * np.cos(k * np.pi * h)) / h**2
