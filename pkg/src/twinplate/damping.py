"""Damping coefficients: rough indicators and smooth compactly-supported bumps.

The smooth profile is a0 * g(x)^4 with g a quintic-smoothstep ramp; the
fourth power keeps both derivative ratios

    |a'|^4 / a^3   and   |a''|^2 / a

bounded right down to the edge of the support, which is exactly what the
structural validation below measures.  Derivatives always come from the
closed form, never from differencing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDampingError, InvalidSupportError, NotApplicableError
from .mesh import Grid

__all__ = [
    "DampingProfile",
    "StructuralReport",
    "indicator_profile",
    "smooth_bump_profile",
    "zero_profile",
    "validate_structural",
    "validate_coercive",
    "gc_preset_1d",
]

Support = tuple[tuple[float, float], ...]

#: Collar width of the 1-D geometric presets.  A single collar at the right
#: end (multiplier point left of the interval, so only x = 1 is illuminated)
#: or collars at both ends satisfy the multiplier geometry on the interval.
DEFAULT_COLLAR = 0.3


def _normalize_support(omega) -> Support:
    """Accept (lo, hi) or an iterable of such pairs; validate against (0, 1)."""
    try:
        pairs = [(float(omega[0]), float(omega[1]))]
        if hasattr(omega[0], "__len__"):
            raise TypeError
    except (TypeError, IndexError):
        pairs = [(float(p[0]), float(p[1])) for p in omega]
    pairs.sort()
    for lo, hi in pairs:
        if not (0.0 <= lo < hi <= 1.0):
            raise InvalidSupportError(
                f"support interval ({lo}, {hi}) is not a nonempty subinterval of (0, 1)"
            )
    for (_, hi_prev), (lo_next, _) in zip(pairs, pairs[1:]):
        if lo_next < hi_prev:
            raise InvalidSupportError(f"support intervals overlap near x={lo_next}")
    return tuple(pairs)


def _smoothstep(t: np.ndarray, order: int) -> np.ndarray:
    """Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0,1] and its derivatives."""
    t = np.clip(t, 0.0, 1.0)
    if order == 0:
        return ((6.0 * t - 15.0) * t + 10.0) * t**3
    if order == 1:
        return 30.0 * t**2 * (t - 1.0) ** 2
    if order == 2:
        return ((120.0 * t - 180.0) * t + 60.0) * t
    raise ValueError(f"derivative order {order} not supported")


def _membership(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Open-interval membership, closed where the support meets the domain
    boundary (the coefficient does not vanish at a boundary it runs into)."""
    left = x >= lo if lo == 0.0 else x > lo
    right = x <= hi if hi == 1.0 else x < hi
    return left & right


def _ramp(x: np.ndarray, support: Support, tau: float, order: int) -> np.ndarray:
    """g(x) (or derivative): 0 outside, quintic ramp over width tau at inner
    edges, 1 on the plateau.  Edges touching the domain boundary get no ramp."""
    out = np.zeros_like(x, dtype=float)
    for lo, hi in support:
        inside = _membership(x, lo, hi)
        ramp_lo = inside & (lo > 0.0) & (x < lo + tau)
        ramp_hi = inside & (hi < 1.0) & (x > hi - tau)
        plateau = inside & ~ramp_lo & ~ramp_hi
        if order == 0:
            out[plateau] = 1.0
        if tau > 0.0:
            sgn = 1.0 if order != 1 else -1.0
            out[ramp_lo] = _smoothstep((x[ramp_lo] - lo) / tau, order) / tau**order
            out[ramp_hi] = sgn * _smoothstep((hi - x[ramp_hi]) / tau, order) / tau**order
    return out


def _bump(x, support, a0, tau, order):
    """a = a0 g^4 and its first two derivatives from the closed form."""
    x = np.asarray(x, dtype=float)
    g = _ramp(x, support, tau, 0)
    if order == 0:
        return a0 * g**4
    g1 = _ramp(x, support, tau, 1)
    if order == 1:
        return a0 * 4.0 * g**3 * g1
    g2 = _ramp(x, support, tau, 2)
    return a0 * (12.0 * g**2 * g1**2 + 4.0 * g**3 * g2)


def _indicator(x, support, a0):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for lo, hi in support:
        out[_membership(x, lo, hi)] = a0
    return out


@dataclass(frozen=True)
class DampingProfile:
    """Sampled damping coefficient plus its closed-form descriptor.

    ``kind`` is one of "zero", "indicator", "smooth".  Node and midpoint
    samples match the grid the profile was built on.  Analytic derivative
    samples are present only for the smooth kind.
    """

    kind: str
    support: Support
    amplitude: float
    transition: float
    node_values: np.ndarray
    midpoint_values: np.ndarray
    node_first_derivative: np.ndarray | None = None
    node_second_derivative: np.ndarray | None = None

    def __call__(self, x, order: int = 0) -> np.ndarray:
        """Evaluate a (order 0) or its derivatives (smooth kind only)."""
        if self.kind == "smooth":
            return _bump(x, self.support, self.amplitude, self.transition, order)
        if order > 0:
            raise NotApplicableError(
                f"{self.kind} profile has no classical derivatives"
            )
        if self.kind == "zero":
            return np.zeros_like(np.asarray(x, dtype=float))
        return _indicator(x, self.support, self.amplitude)

    @property
    def plateau(self) -> Support:
        """Region where the profile sits at full amplitude."""
        if self.kind != "smooth":
            return self.support
        out = []
        for lo, hi in self.support:
            plo = lo + self.transition if lo > 0.0 else lo
            phi = hi - self.transition if hi < 1.0 else hi
            if plo < phi:
                out.append((plo, phi))
        return tuple(out)


def _sample(grid: Grid, fn) -> tuple[np.ndarray, np.ndarray]:
    """Node and midpoint samples; 1-D profiles only."""
    if grid.dimension != 1:
        raise InvalidSupportError("damping profiles are one-dimensional")
    return fn(grid.nodes()), fn(grid.midpoints())


def zero_profile(grid: Grid) -> DampingProfile:
    """a == 0: the undamped configuration."""
    nodes, mids = _sample(grid, lambda x: np.zeros_like(x))
    return DampingProfile("zero", (), 0.0, 0.0, nodes, mids)


def indicator_profile(omega, a0: float, grid: Grid) -> DampingProfile:
    """a = a0 on omega, 0 elsewhere; membership decides each sample."""
    if a0 <= 0:
        raise InvalidDampingError(f"amplitude must be positive, got a0={a0}")
    support = _normalize_support(omega)
    nodes, mids = _sample(grid, lambda x: _indicator(x, support, a0))
    return DampingProfile("indicator", support, float(a0), 0.0, nodes, mids)


def smooth_bump_profile(omega, a0: float, tau: float, grid: Grid) -> DampingProfile:
    """a = a0 * (quintic smoothstep)^4 with ramps of width tau at inner edges."""
    if a0 <= 0:
        raise InvalidDampingError(f"amplitude must be positive, got a0={a0}")
    if tau <= 0:
        raise InvalidSupportError(f"transition width must be positive, got tau={tau}")
    support = _normalize_support(omega)
    for lo, hi in support:
        need = tau * ((lo > 0.0) + (hi < 1.0))
        if hi - lo <= need:
            raise InvalidSupportError(
                f"transition width tau={tau} leaves no plateau inside ({lo}, {hi})"
            )
    nodes, mids = _sample(grid, lambda x: _bump(x, support, a0, tau, 0))
    x_nodes = grid.nodes()
    return DampingProfile(
        "smooth",
        support,
        float(a0),
        float(tau),
        nodes,
        mids,
        node_first_derivative=_bump(x_nodes, support, a0, tau, 1),
        node_second_derivative=_bump(x_nodes, support, a0, tau, 2),
    )


@dataclass(frozen=True)
class StructuralReport:
    """Measured derivative-ratio constants of a smooth profile.

    m1 = sup |a'|^4 / a^3 and m2 = sup |a''|^2 / a over {a > floor}; the
    profile passes when both stay below ``cap`` and the plateau really
    carries the full amplitude.
    """

    m1: float
    m2: float
    floor: float
    cap: float
    coercivity_constant: float
    passed: bool
    samples: int


def validate_structural(
    profile: DampingProfile,
    floor: float | None = None,
    cap: float = 1e9,
    samples: int | None = None,
) -> StructuralReport:
    """Measure the derivative-ratio suprema of a smooth profile.

    Sampling is at least 10x finer than any grid the profile could live on
    (default 10^4+1 uniform points).  Discontinuous profiles are rejected:
    the jump makes both ratios unbounded.
    """
    if profile.kind != "smooth":
        raise NotApplicableError(
            f"structural constants are defined for smooth profiles, not {profile.kind!r}"
        )
    if floor is None:
        floor = 1e-12 * profile.amplitude
    # at least 10x the resolution of the grid the profile was sampled on
    n_samples = samples if samples is not None else max(10001, 10 * len(profile.node_values) + 11)
    x = np.linspace(0.0, 1.0, n_samples)
    a = profile(x)
    mask = a > floor
    a1 = profile(x, order=1)[mask]
    a2 = profile(x, order=2)[mask]
    am = a[mask]
    m1 = float(np.max(np.abs(a1) ** 4 / am**3)) if mask.any() else 0.0
    m2 = float(np.max(a2**2 / am)) if mask.any() else 0.0
    coercivity = 0.0
    for lo, hi in profile.plateau:
        inside = (x >= lo) & (x <= hi)
        if inside.any():
            lvl = float(np.min(a[inside]))
            coercivity = lvl if coercivity == 0.0 else min(coercivity, lvl)
    passed = np.isfinite(m1) and np.isfinite(m2) and m1 <= cap and m2 <= cap
    passed = bool(passed and coercivity > 0.0)
    return StructuralReport(m1, m2, float(floor), float(cap), coercivity, passed, n_samples)


def validate_coercive(profile: DampingProfile, grid: Grid, a0_required: float) -> bool:
    """True iff the profile reaches a0_required on every node of its
    effective support (the plateau, for smooth profiles)."""
    region = profile.plateau
    x = grid.nodes()
    values = []
    for lo, hi in region:
        inside = _membership(x, lo, hi) if profile.kind != "smooth" else (x >= lo) & (x <= hi)
        values.append(profile(x[inside]))
    if not values or sum(v.size for v in values) == 0:
        return False
    return bool(min(float(np.min(v)) for v in values if v.size) >= a0_required)


def gc_preset_1d(name: str, collar: float = DEFAULT_COLLAR):
    """Named damping supports satisfying the interval multiplier geometry."""
    if not (0.0 < collar < 0.5):
        raise InvalidSupportError(f"collar width must be in (0, 0.5), got {collar}")
    if name == "right-collar":
        return (1.0 - collar, 1.0)
    if name == "both-collars":
        return ((0.0, collar), (1.0 - collar, 1.0))
    if name == "full":
        return (0.0, 1.0)
    raise InvalidSupportError(f"unknown geometric preset {name!r}")
