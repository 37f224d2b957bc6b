"""Exception hierarchy shared across the library."""
from __future__ import annotations


class JumpwaveError(Exception):
    """Base class for all library errors."""


class ConfigError(JumpwaveError):
    """Invalid run configuration (CLI exit code 2)."""


class SolverError(JumpwaveError):
    """Numerical solve failed (CLI exit code 3)."""


class NonPositiveTarget(SolverError):
    """Inverse of the Laplace exponent requested at a level y <= 0."""


class NoConvergence(SolverError):
    """Iteration budget exhausted before reaching tolerance."""


class DegenerateSlope(SolverError):
    """Derivative of the Laplace exponent vanished at a root."""


class SeriesNotConverged(SolverError):
    """Jump series truncation criterion unmet at the hard cap."""


class BoundaryNotBracketed(SolverError):
    """Free-boundary equation has no sign change on the search bracket."""


class SingularSystem(SolverError):
    """Leading bracket of the coefficient system vanished."""


class PriorOrderMissing(SolverError):
    """Higher-order solve requested without completed lower orders."""


class GridTooCoarse(SolverError):
    """Maturity grid has too few nodes for finite differencing."""


class UnstableGrid(SolverError):
    """Explicit finite-difference grid violates the stability bound."""


class OutOfDomain(SolverError):
    """Requested spot lies outside the finite-difference grid."""
