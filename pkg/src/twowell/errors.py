"""Exception types raised across the package."""


class TwoWellError(Exception):
    """Base class for all package errors."""


class InvalidParameters(TwoWellError, ValueError):
    """Raised when model or bath parameters violate their preconditions."""


class ConvergenceError(TwoWellError, RuntimeError):
    """The tridiagonal eigensolver exhausted its iteration budget."""


class DivergentParameters(TwoWellError):
    """The grand partition function does not converge at the requested point."""


class TruncationOverflow(TwoWellError):
    """The sector sum hit its size cap before reaching the requested tolerance."""


class DegenerateDirection(TwoWellError):
    """W = J = 0, so every phase angle maximizes the mode occupation."""


class NoBoundary(TwoWellError):
    """No divergence point exists for the requested chemical potential."""


class QuadratureFailure(TwoWellError):
    """The saddle-point quadrature could not meet its tail or accuracy test."""


class InsufficientData(TwoWellError):
    """Too few usable rows to fit a power law."""
