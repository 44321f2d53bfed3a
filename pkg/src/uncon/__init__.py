"""Unconstraining censored airline booking curves.

GP regression with a variable-degree polynomial covariance and a Poisson
observation model recovers latent demand on days where a booking limit
truncated the record; classical baselines (EM, projection-detruncation,
exponential smoothing, mean imputation) are included for comparison.
"""
from ._backend import BACKEND_NAME

__version__ = "0.1.0"
__all__ = ["BACKEND_NAME", "__version__"]
