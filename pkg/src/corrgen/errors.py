"""Exception types shared across the package."""


class CorrgenError(Exception):
    """Base class for all corrgen errors."""


class InvalidInput(CorrgenError, ValueError):
    """Malformed argument: bad probability, dimension mismatch, unreadable file."""


class NumericalFailure(CorrgenError):
    """An iterative kernel failed to converge within its sweep budget."""


class NotPositiveDefinite(CorrgenError):
    """Cholesky factorization hit a non-positive pivot."""


class NotChordal(CorrgenError):
    """A chordal graph was required but the input graph has a chordless cycle."""


class DegenerateRow(CorrgenError):
    """Partial orthogonalization drove a factor row to (near) zero norm.

    Callers are expected to retry with a fresh seed.
    """
