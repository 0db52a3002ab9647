"""Base exception shared by all package errors.

The CLI maps subclasses onto exit codes, so anything raised out of the
library should derive from CfsError.
"""


class CfsError(Exception):
    pass
