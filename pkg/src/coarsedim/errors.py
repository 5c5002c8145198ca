"""Exception hierarchy shared by every module."""


class CoarseError(Exception):
    """Base class for all errors raised by coarsedim."""


class ModelMismatchError(CoarseError, ValueError):
    """Elements or sets from different group models were combined."""


class ConfigError(CoarseError, ValueError):
    """A group description, preset, or run configuration could not be parsed."""


class BudgetError(CoarseError):
    """A configured search or enumeration budget was exhausted."""


class SearchBudgetError(BudgetError):
    """A norm / factorization search hit its node budget before reaching the target."""


class ResourceLimitError(BudgetError):
    """A ball enumeration exceeded the configured size cap."""


class NotGeneratedError(CoarseError):
    """The search exhausted the reachable set: the element is not generated."""


class EmptyFamilyError(CoarseError):
    """No member of a family meets the requested subgroup."""


class NotNormalError(CoarseError):
    """A subgroup failed the sampled normality test.

    ``witness`` is a pair ``(g, n)`` with ``g n g^-1`` outside the subgroup.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainMismatchError(CoarseError, ValueError):
    """Two map tables are defined on different domains."""


class PreconditionError(CoarseError):
    """A construction or conversion was called on data violating its hypotheses."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class VerificationError(CoarseError):
    """A constructor produced output that fails verification (an internal defect)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
