"""Exact per-mode analysis of the globally damped two-speed model.

With a diagonal stiffness model (eigenvalues mu_k = (k pi)^4, the hinged-beam
Fourier spectrum) the coupled system block-diagonalizes into 4x4 blocks per
mode, one for each stiffness eigenvalue, and the resolvent norm of the full
model is the supremum of the per-block norms.  Everything here is dense 4x4
linear algebra, so the numbers are exact up to round-off: this module is its
own oracle.

Resolvent peaks sit on the lightly damped branch of each block and become
extremely narrow when the damping exponent is negative, so the exponent
sweep samples the shifts at the per-mode peak locations (brute force over
each block's eigenfrequencies plus a local refinement) rather than on a
blind log grid, which would fall between the peaks and measure only the
inter-resonance floor.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

from .errors import AxisEigenvalueError, InvalidParameterError
from .resolvent import FitResult, fit_exponent_points

__all__ = [
    "AbstractConfig",
    "ModeBlock",
    "ThetaFit",
    "mode_generator",
    "abstract_resolvent_norm",
    "mode_peak",
    "theta_exponent_sweep",
]


@dataclass(frozen=True)
class AbstractConfig:
    """Speeds, coupling strength and damping exponent of the abstract model."""

    a: float = 1.0
    b: float = 2.0
    gamma: float = 1.0
    theta: float = 0.5

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameterError(f"speeds must be positive, got a={self.a}, b={self.b}")
        if self.gamma < 0:
            # gamma = 0 is the undamped reference used by oracle checks
            raise InvalidParameterError(f"coupling must be nonnegative, got gamma={self.gamma}")
        if not -1.0 <= self.theta <= 1.0:
            raise InvalidParameterError(f"exponent must lie in [-1, 1], got theta={self.theta}")

    @property
    def equal_speeds(self) -> bool:
        """Equal speeds leave the difference component undamped (unstable)."""
        return self.a == self.b

    def mode_eigenvalue(self, k: int) -> float:
        return float((k * np.pi) ** 4)


@dataclass(frozen=True)
class ModeBlock:
    """4x4 generator of one mode on the state (y, z, y', z')."""

    mu: float
    matrix: np.ndarray
    energy_weights: np.ndarray

    def dissipation_rate(self, X: np.ndarray, config: AbstractConfig) -> float:
        """gamma mu^theta |y' + z'|^2: the exact per-mode dissipation."""
        s = X[2] + X[3]
        return float(config.gamma * self.mu**config.theta * abs(s) ** 2)

    def energy_inner(self, X: np.ndarray, Y: np.ndarray) -> complex:
        return complex(np.vdot(Y, self.energy_weights * X))


def mode_generator(mu: float, config: AbstractConfig) -> ModeBlock:
    """Block dynamics y'' = -a mu y - g (y'+z'), z'' = -b mu z - g (y'+z')."""
    if mu <= 0:
        raise InvalidParameterError(f"mode eigenvalue must be positive, got {mu}")
    g = config.gamma * mu**config.theta
    matrix = np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-config.a * mu, 0.0, -g, -g],
            [0.0, -config.b * mu, -g, -g],
        ]
    )
    weights = np.array([config.a * mu, config.b * mu, 1.0, 1.0])
    return ModeBlock(mu=float(mu), matrix=matrix, energy_weights=weights)


def _stacked_blocks(config: AbstractConfig, k_max: int):
    """Matrices and energy scalings of modes 1..k_max, stacked for batch SVD."""
    k = np.arange(1, k_max + 1)
    mu = (k * np.pi) ** 4
    g = config.gamma * mu**config.theta
    mats = np.zeros((k_max, 4, 4))
    mats[:, 0, 2] = 1.0
    mats[:, 1, 3] = 1.0
    mats[:, 2, 0] = -config.a * mu
    mats[:, 2, 2] = -g
    mats[:, 2, 3] = -g
    mats[:, 3, 1] = -config.b * mu
    mats[:, 3, 2] = -g
    mats[:, 3, 3] = -g
    scale = np.ones((k_max, 4))
    scale[:, 0] = np.sqrt(config.a * mu)
    scale[:, 1] = np.sqrt(config.b * mu)
    return mats, scale


def _per_mode_norms(config: AbstractConfig, lam: float, k_max: int) -> np.ndarray:
    mats, scale = _stacked_blocks(config, k_max)
    pencil = 1j * lam * np.eye(4)[None, :, :] - mats
    transformed = scale[:, :, None] * pencil / scale[:, None, :]
    singular = np.linalg.svd(transformed, compute_uv=False)
    smallest = singular[:, -1]
    if np.any(smallest == 0):
        raise AxisEigenvalueError(lam, "a mode block is exactly singular")
    if config.equal_speeds and np.any(smallest <= 1e-12 * singular[:, 0]):
        # equal speeds leave the difference branch on the axis; a shift this
        # close to a q-frequency is a spectrum hit, not a resonance peak
        raise AxisEigenvalueError(lam, "shift sits on an undamped difference mode")
    return 1.0 / smallest


def abstract_resolvent_norm(
    config: AbstractConfig, lam: float, rel_tol: float = 1e-3
) -> float:
    """sup over modes of the energy-norm resolvent of each 4x4 block.

    Truncation starts beyond ten times the resonant mode index and doubles
    until the supremum moves less than ``rel_tol``; modes with frequencies
    far above the shift contribute only O(1/distance) and cannot change the
    supremum.
    """
    lam = float(lam)
    k0 = int(np.ceil((((10.0 * max(abs(lam), 1.0)) ** 2) / min(config.a, config.b)) ** 0.25 / np.pi))
    k_max = max(8, k0)
    prev = None
    while True:
        norms = _per_mode_norms(config, lam, k_max)
        best = float(np.max(norms))
        if prev is not None and abs(best - prev) <= rel_tol * best:
            return best
        prev = best
        k_max *= 2
        if k_max > 2**22:
            raise InvalidParameterError("mode truncation failed to converge")


def mode_peak(config: AbstractConfig, k: int, refine: int = 21) -> tuple[float, float] | None:
    """Peak of mode k's block norm over shifts near its eigenfrequencies.

    Candidates are the imaginary parts of the block's eigenvalues; each gets
    a local scan (the exact eigenfrequency is always included, which matters
    when negative exponents make the peak width collapse).  Returns
    (shift, block norm) or None for a block with no oscillatory branch.
    """
    block = mode_generator(config.mode_eigenvalue(k), config)
    freqs = sorted({abs(e.imag) for e in sla.eigvals(block.matrix) if abs(e.imag) > 1e-9})
    if not freqs:
        return None
    scale = block.energy_weights**0.5
    best_lam, best_val = 0.0, -np.inf
    for f in freqs:
        offsets = np.linspace(0.9, 1.1, refine) if refine > 1 else np.array([1.0])
        for lam in f * offsets:
            pencil = 1j * lam * np.eye(4) - block.matrix
            transformed = scale[:, None] * pencil / scale[None, :]
            val = 1.0 / sla.svdvals(transformed)[-1]
            if val > best_val:
                best_lam, best_val = float(lam), float(val)
    return best_lam, best_val


@dataclass(frozen=True)
class ThetaFit:
    """Fitted norm exponent at one damping exponent."""

    theta: float
    gamma: float
    prefactor: float
    residual: float
    n_samples: int

    @classmethod
    def from_fit(cls, theta: float, fit: FitResult) -> "ThetaFit":
        return cls(theta=float(theta), gamma=fit.gamma, prefactor=fit.prefactor,
                   residual=fit.residual, n_samples=fit.n_samples)


def _peak_aligned_samples(
    config: AbstractConfig, band: tuple[float, float], points: int
) -> tuple[np.ndarray, np.ndarray]:
    """Resolvent samples at per-mode peak shifts, thinned to ~points."""
    lo, hi = band
    k_hi = int(np.ceil((hi / np.sqrt(min(config.a, config.b))) ** 0.5 / np.pi)) + 4
    candidates = np.unique(np.round(np.geomspace(1, k_hi, 4 * points)).astype(int))
    lams, norms = [], []
    for k in candidates:
        peak = mode_peak(config, int(k))
        if peak is None:
            continue
        lam, _ = peak
        if lo <= lam <= hi:
            lams.append(lam)
            norms.append(abstract_resolvent_norm(config, lam))
    if len(lams) < 6:
        raise InvalidParameterError(
            f"fewer than 6 resonance peaks in band {band}; widen the band"
        )
    lams = np.asarray(lams)
    norms = np.asarray(norms)
    order = np.argsort(lams)
    lams, norms = lams[order], norms[order]
    if len(lams) > points:
        targets = np.geomspace(lams[0], lams[-1], points)
        keep = np.unique([int(np.argmin(np.abs(np.log(lams) - np.log(t)))) for t in targets])
        lams, norms = lams[keep], norms[keep]
    return lams, norms


def theta_exponent_sweep(
    config_base: AbstractConfig,
    thetas,
    lambda_band: tuple[float, float] = (1e2, 1e6),
    points: int = 40,
) -> list[ThetaFit]:
    """Fitted log-log norm exponent for each damping exponent.

    Positive gamma means the resolvent decays like lambda^(-gamma) along the
    axis; negative gamma means growth.  Requires distinct speeds.
    """
    if config_base.equal_speeds:
        raise InvalidParameterError("exponent sweep requires distinct speeds")
    if not (0 < lambda_band[0] < lambda_band[1]):
        raise InvalidParameterError(f"bad shift band {lambda_band}")
    results = []
    for theta in thetas:
        cfg = replace(config_base, theta=float(theta))
        lams, norms = _peak_aligned_samples(cfg, lambda_band, points)
        fit = fit_exponent_points(lams, norms, (float(lams[0]), float(lams[-1])))
        results.append(ThetaFit.from_fit(theta, fit))
    return results
