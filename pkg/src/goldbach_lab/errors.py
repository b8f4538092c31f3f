"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: validation-type errors exit 2,
capacity errors exit 3.
"""


class GoldbachLabError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GoldbachLabError, ValueError):
    """Invalid argument or configuration."""


class RangeError(ValidationError, IndexError):
    """An index or cutoff lies outside the data that was built."""


class DomainError(ValidationError):
    """A function was evaluated outside its domain (e.g. the kernel at z = 0)."""


class DegenerateInputError(ValidationError):
    """Too few usable samples, or an empty arc where one is required."""


class ConfigurationError(ValidationError):
    """Quadrature or transform parameters violate a bandwidth requirement."""


class CacheFormatError(ValidationError):
    """A cache file has the wrong magic, version, kind or length."""


class CapacityError(GoldbachLabError):
    """A requested table or transform exceeds the configured budget."""

    def __init__(self, what, requested, limit):
        self.what = what
        self.requested = requested
        self.limit = limit
        super().__init__(f"{what}: requested {requested} exceeds limit {limit}")
