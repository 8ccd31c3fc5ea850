"""Exception types raised across dlakit."""


class DlaError(Exception):
    """Base class for all dlakit errors."""


class StructuralError(DlaError, ValueError):
    """Malformed input: site-count mismatch, bad literal, n below the minimum."""


class InvarianceError(DlaError, ValueError):
    """An element expected to be invariant (cyclic or subspace) is not."""


class InconsistencyError(DlaError, RuntimeError):
    """An internal algebraic identity failed to hold."""


class RankInstabilityError(DlaError, RuntimeError):
    """Numerical rank could not be decided: no clean singular-value gap."""


class SizeCapError(DlaError, ValueError):
    """Dense computation requested above the supported site count."""
