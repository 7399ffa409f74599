"""Exception types shared across the package."""


class WatermelonError(Exception):
    """Base class for all numerical and usage failures raised here."""


class ConvergenceError(WatermelonError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class WindowError(WatermelonError):
    """A lattice truncation window could not be certified."""


class CoverageError(WatermelonError):
    """An evaluation point lies outside the tabulated grid."""


class TailClosureError(WatermelonError):
    """An analytic tail closure is too large relative to the grid part."""


class OrderFitError(WatermelonError):
    """Errors too small (or too irregular) to fit a convergence order."""


class PrecisionError(WatermelonError):
    """Floating-point precision exhausted; extended mode suggested."""
