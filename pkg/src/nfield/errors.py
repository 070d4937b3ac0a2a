"""Exception hierarchy shared across the package."""


class NFieldError(Exception):
    """Base class for all package errors."""


class ParameterError(NFieldError, ValueError):
    """A scalar parameter violates its documented constraint."""


class NonIntegrableError(ParameterError):
    """Weight parameters define a density that does not integrate."""


class ResolutionError(ParameterError):
    """Grid spacing too coarse for the requested stencil."""


class EmptyInteriorError(ParameterError):
    """Requested margin leaves no interior grid points."""


class ShapeMismatchError(NFieldError, ValueError):
    """Arrays or grids that must agree do not."""


class NonFiniteError(NFieldError, ValueError):
    """NaN or Inf encountered where finite values are required."""


class SnapshotError(NFieldError, ValueError):
    """Base class for snapshot parse failures."""


class BadMagicError(SnapshotError):
    pass


class UnsupportedVersionError(SnapshotError):
    pass


class TruncatedSnapshotError(SnapshotError):
    pass


class InvertibilityError(NFieldError):
    """Operation requires a strictly increasing firing rate."""


class DomainError(ParameterError):
    """Argument outside the function's domain."""


class DivergenceError(NFieldError, RuntimeError):
    """Non-finite state encountered mid-simulation."""

    def __init__(self, step: int, time: float):
        self.step = step
        self.time = time
        super().__init__(f"non-finite state at step {step} (t = {time:g})")


class OutOfModelError(NFieldError):
    """Computed stimulus is not positive, so the model does not apply."""


class EmptySampleError(ParameterError):
    """An attractor sample with no snapshots was supplied."""


class ConfigError(NFieldError, ValueError):
    """Config file problem; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
