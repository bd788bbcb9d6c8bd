"""Exception hierarchy shared across the package."""


class CharpError(Exception):
    """Base class for all package errors."""


class UncertifiedLeadingTerm(CharpError):
    """A valuation query hit the truncation horizon before certifying a
    leading term.  This is the precision-escalation signal: drivers catch it,
    enlarge the working window and recompute."""


class PrecisionExhausted(CharpError):
    """The window cap was reached without certifying the queried value."""


class PartsMismatch(CharpError):
    """Multinomial parts do not sum to the top argument."""


class BudgetExceeded(CharpError):
    """Explicit chain enumeration was asked to expand beyond its budget."""


class DivisibilityViolation(CharpError):
    """Grid arguments violate the required p-power divisibility."""


class DegenerateLinearMap(CharpError):
    """The map is z -> lambda*z (empty support): trivially linearizable and
    outside the dominance test."""


class DominanceNotCertified(CharpError):
    """An operation requiring a certified dominant level was called on a map
    for which no such certificate is available."""


class ConfigError(CharpError):
    """Command line / config file could not be parsed into a valid job."""
