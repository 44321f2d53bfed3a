"""Exception types shared across the package."""


class UnconError(Exception):
    """Base class for all package-specific errors."""


class SingularShift(UnconError):
    """Spectral shift failed to produce a usable covariance factorization."""


class NoConvergence(UnconError):
    """Newton mode search did not converge within the iteration budget."""


class NumericalBreakdown(UnconError):
    """Non-finite value encountered during a marginal-likelihood evaluation."""


class AllGridPointsFailed(UnconError):
    """Every hyperparameter grid point failed to produce a finite fit."""


class DegenerateSpread(UserWarning):
    """Spread of the uncensored values is numerically zero; the estimator
    fell back to mean imputation."""


class NoReferenceCurves(UnconError):
    """A day-level task has no unconstrained reference observations."""


class TooFewObservations(UnconError):
    """Not enough uncensored days to fit a curve-level model."""


class ShapeMismatch(UnconError):
    """Input arrays disagree in length."""


class WindowTooLong(UnconError):
    """Requested censoring window does not leave any observed days."""
