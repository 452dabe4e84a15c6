"""Exception types shared across the package."""


class TwinplateError(Exception):
    """Base class for all package-specific errors."""


class InvalidGridError(TwinplateError, ValueError):
    """Grid parameters outside the supported range."""


class InvalidDampingError(TwinplateError, ValueError):
    """Damping coefficient data violates a precondition (e.g. negative values)."""


class InvalidSupportError(TwinplateError, ValueError):
    """Damping support is empty, out of bounds, or too small for the ramp."""


class InvalidParameterError(TwinplateError, ValueError):
    """Physical parameter outside its admissible range (e.g. nonpositive speed)."""


class NotApplicableError(TwinplateError, ValueError):
    """Requested analysis does not apply to this object (e.g. derivative
    ratios of a discontinuous profile)."""


class DenseCapError(TwinplateError, ValueError):
    """Problem too large for a dense eigensolve; use sweep-based diagnostics."""


class AxisEigenvalueError(TwinplateError, RuntimeError):
    """A shift on the imaginary axis hit (or nearly hit) the spectrum."""

    def __init__(self, lam: float, detail: str = ""):
        self.lam = lam
        msg = f"i*{lam!r} is an eigenvalue of the generator"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConfigError(TwinplateError, ValueError):
    """Configuration file rejected by strict parsing."""
