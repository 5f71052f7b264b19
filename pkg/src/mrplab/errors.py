"""Exception hierarchy shared across the package.

Every error raised on purpose by this package derives from MrpLabError so
callers (and the CLI exit-code mapping) can distinguish our failures from
genuine bugs.  The leaf classes mirror the failure modes of the public
operations: bad construction input, incomplete simulation data, queries
outside the simulated window, parameter-domain violations, and the
statistical/numeric preconditions of the testers.
"""

from __future__ import annotations


class MrpLabError(Exception):
    """Base class for all package errors."""


class RejectedInputError(MrpLabError, ValueError):
    """Construction input violates a documented invariant."""


class IncompletePathError(MrpLabError):
    """Supplied interarrivals do not cover the requested horizon."""


class OutOfHorizonError(MrpLabError):
    """Query at a time (or index) beyond what the path can answer."""


class ParameterError(MrpLabError, ValueError):
    """Kernel or mixing parameter outside its admissible domain."""


class NoDensityError(MrpLabError):
    """Density requested from a kernel that has none."""


class RegularityViolationError(MrpLabError):
    """A regularity requirement (existence of a positive hazard at zero,
    dominated differentiable cdf, injective rate map) fails."""


class NullSetError(MrpLabError):
    """Parameter map evaluated or inverted on its excluded set."""


class InjectivityError(MrpLabError):
    """Parameter map is not injective on the sampled support."""


class InsufficientMassError(MrpLabError):
    """Conditioning set has too little probability mass to estimate."""


class InsufficientDataError(MrpLabError):
    """Ensemble too small for any cell of a statistical test."""


class NumericError(MrpLabError):
    """Quadrature or root finding failed to reach its tolerance."""
