"""Spectral analysis and simulation of the Ornstein-Uhlenbeck process driven
by symmetric stable noise.

Modules: ``numerics`` (quadrature, grids, rate fits), ``specfun`` (special
functions), ``eigen`` (eigenfunctions and ladder operators), ``kernel``
(wave-number rescaling kernels), ``evolve`` (exact CF evolution),
``observables`` (relaxation of bounded observables), ``montecarlo``
(simulation) and ``cli``.
"""
from .errors import (DomainError, GridHullError, InsufficientRunLength, LevyOUError,
                     NumericalError, QuadratureError)

__version__ = "0.1.0"

__all__ = ["DomainError", "GridHullError", "InsufficientRunLength", "LevyOUError",
           "NumericalError", "QuadratureError", "__version__"]
