"""Exception hierarchy shared across the package.

Two families matter for callers (and for the CLI exit-code contract):
``DataError`` covers anything wrong with inputs or configuration, while
``NumericsError`` covers failures of the numerics themselves (diverging
integrations, inconsistent cross-checks).
"""


class DataError(ValueError):
    """Invalid input data, configuration, or domain violation."""


class ParseError(DataError):
    """Malformed file content (bad dates, bad numbers, wrong header)."""


class NumericsError(RuntimeError):
    """Numerical failure: blow-up, non-finite state, failed cross-check."""
