"""Exception types shared across the package.

The guard errors raised when incompatible sample spaces are mixed
(IncompatibleProjectors, IncompatibleFrameworks, MeaninglessCombination)
all derive from SingleFrameworkRuleError so callers can catch the whole
class of "this combination is meaningless, not false" failures at once.
They are deliberately distinct from ValidationError: a zero projector is
a perfectly good value, a noncommuting conjunction is not a value at all.
"""


class FwlabError(Exception):
    """Base class for all errors raised by fwlab."""


class ValidationError(FwlabError):
    """A value violates a construction invariant (not Hermitian, bad trace, ...)."""


class NotHermitian(ValidationError):
    """Matrix is not Hermitian within the algebraic tolerance."""


class NotNormalized(ValidationError):
    """Ket does not have unit norm within tolerance."""


class NoConvergence(FwlabError):
    """The eigensolver failed to converge."""


class DimensionMismatch(FwlabError):
    """Operands live on spaces of different dimension."""


class SingleFrameworkRuleError(FwlabError):
    """Base for guard errors: the requested combination is meaningless."""


class IncompatibleProjectors(SingleFrameworkRuleError):
    """Conjunction of noncommuting projectors; meaningless, not the zero projector."""


class IncompatibleFrameworks(SingleFrameworkRuleError):
    """Two sample spaces have noncommuting blocks and admit no common refinement."""


class MeaninglessCombination(SingleFrameworkRuleError):
    """Events or descriptions from incompatible frameworks cannot be combined."""


class FrameworkMismatch(FwlabError):
    """An event was evaluated against a distribution over a different framework."""


class NotInAlgebra(FwlabError):
    """Projector is not a sum of blocks of the given sample space."""


class InconsistentFamily(FwlabError):
    """History family fails the consistency conditions; no probabilities assigned."""


class TooManyHistories(FwlabError):
    """History family exceeds the enumeration cap."""


class InvalidChannel(ValidationError):
    """Kraus operators do not describe a trace-preserving channel."""


class InvalidDistribution(ValidationError):
    """Probability vector is negative beyond tolerance or not normalized."""
