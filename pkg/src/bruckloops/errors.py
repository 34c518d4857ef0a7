"""Exception types shared across the package.

Every failure mode raised by the numeric layers subclasses
:class:`BruckLoopsError`, so callers (notably the CLI) can distinguish
"the input/configuration is bad" from "a verified property failed".
"""


class BruckLoopsError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(BruckLoopsError):
    """Input matrix is not hermitian within tolerance."""


class NoConvergence(BruckLoopsError):
    """Iterative eigensolver failed to reach its stopping threshold."""


class NotPositiveDefinite(BruckLoopsError):
    """A spectral function requiring positivity met a non-positive eigenvalue."""


class Singular(BruckLoopsError):
    """A pivot fell below tolerance during elimination."""


class RankDeficient(BruckLoopsError):
    """Columns handed to orthonormalization are not linearly independent."""


class IsotropicPivot(BruckLoopsError):
    """A form-orthonormalization pivot has (near-)zero form norm."""


class DimensionMismatch(BruckLoopsError):
    """Operands have incompatible shapes or forms."""


class NotInGroup(BruckLoopsError):
    """A matrix fails the membership residuals required by an operation."""


class SamplerUnavailable(BruckLoopsError):
    """An identity checker needs samples but the loop has no sampler."""


class InversesDisagree(BruckLoopsError):
    """Left and right inverses of a loop element differ beyond tolerance."""


class IllConditioned(BruckLoopsError):
    """A meet decision fell inside the ambiguity band between the
    clearly-intersecting and clearly-disjoint regimes."""


class TransversalityViolated(BruckLoopsError):
    """A subspace expected to meet another in a single point does not."""


class NotInOrbit(BruckLoopsError):
    """A direction at infinity is not in the orbit of the carrier subspace."""


class WitnessNotFound(BruckLoopsError):
    """The non-isomorphism witness search exhausted its sample budget."""


class RankAmbiguous(BruckLoopsError):
    """The dimension rank estimate lacks a clean singular-value gap at too
    many sample points."""


class ConfigInvalid(BruckLoopsError):
    """A suite configuration violates a structural invariant."""


class ParseError(BruckLoopsError):
    """A matrix or element file could not be parsed."""
