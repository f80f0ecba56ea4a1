"""Exception types shared across the package."""


class OneBitLinkError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(OneBitLinkError, ValueError):
    """Invalid configuration value or operation argument."""


class RateMismatchError(OneBitLinkError, ValueError):
    """Filter and signal sample rates disagree."""


class DegenerateInputError(OneBitLinkError, ValueError):
    """An input that must be strictly positive (definite) is not."""


class NotACovarianceError(OneBitLinkError, ValueError):
    """Normalized correlations exceed [-1, 1] beyond rounding slack."""


class IllConditionedError(OneBitLinkError, RuntimeError):
    """A linear system is too ill-conditioned to solve reliably."""


class BracketError(OneBitLinkError, RuntimeError):
    """A target-value search could not bracket the requested level."""


class MonotonicityError(OneBitLinkError, RuntimeError):
    """BER-vs-SNR ordering violated beyond Monte Carlo noise."""
