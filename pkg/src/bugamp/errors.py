"""Exception types shared across the package."""


class BugampError(Exception):
    """Base class for all package-specific errors."""


class BoundsViolation(BugampError):
    """A parameter vector lies outside its declared per-dimension bounds."""


class DimMismatch(BugampError):
    """Two vectors that must share a dimension do not."""


class MalformedProgram(BugampError):
    """A thread program broke the scheduler contract (e.g. released a lock
    it does not own, or was stepped after finishing)."""


class NoRunnable(BugampError):
    """next_runnable was called with no runnable thread; the caller should
    have classified termination or deadlock first."""


class UnknownProblem(BugampError):
    """Requested benchmark problem name is not in the registry."""


class BudgetExhausted(BugampError):
    """An operation needs more simulator executions than the ledger allows."""


class TooFewPairs(BugampError):
    """Signed-rank test invoked with fewer than five nonzero differences."""


class TooFewRows(BugampError):
    """Cross-validation invoked with fewer rows than folds."""


class SingleClassData(BugampError):
    """A training set contains only one class label."""


class DegenerateData(BugampError):
    """All feature rows identical with mixed labels; no split can help."""


class ConfigError(BugampError):
    """Invalid run configuration; message names the offending field."""
