"""Exception and warning types shared across the package."""


class BulkEdgeError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(BulkEdgeError, ValueError):
    """An argument violates an operation's preconditions."""


class GaplessInputError(BulkEdgeError):
    """A Hamiltonian has an eigenvalue too close to zero where a gap is required."""


class CutoffInsufficientError(BulkEdgeError):
    """Fourier coefficients beyond the requested cutoff are not negligible."""


class WindowBoundaryError(BulkEdgeError):
    """An eigenvalue sits on the spectral-window boundary; the window is ill-conditioned."""


class BoundaryDegenerateError(BulkEdgeError):
    """Parameters sit on the degeneration locus |c| = 1 where the half-line operator loses Fredholmness."""


class NotAFermiPointError(BulkEdgeError):
    """The candidate's Jacobian is degenerate; no sign coordinate exists."""


class TrackingFailureError(BulkEdgeError):
    """Eigenvalue tracking could not be resolved by adaptive bisection."""


class SymmetryViolationError(BulkEdgeError):
    """A family fails a symmetry requirement (time reversal, pairing, fixed points)."""


class ResolutionInsufficientError(BulkEdgeError):
    """The grid is too coarse for the principal matrix logarithm to be well defined."""


class ResolutionInsufficientWarning(UserWarning):
    """The lattice invariant is suspiciously far from the nearest integer."""


class UnrefinedCandidateWarning(UserWarning):
    """A grid-scan candidate did not converge under Newton refinement and was dropped."""
