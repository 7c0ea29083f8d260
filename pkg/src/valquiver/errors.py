"""Exception hierarchy shared across the workbench.

The CLI maps ``ValidationError`` to exit code 2, ``SizeLimitExceeded`` to 3
and ``ParseError`` to 4.
"""


class WorkbenchError(Exception):
    pass


class ValidationError(WorkbenchError, ValueError):
    pass


class SizeLimitExceeded(WorkbenchError):
    pass


class ParseError(WorkbenchError, ValueError):
    pass


class NotConnected(ValidationError):
    pass


class NotAcyclic(ValidationError):
    pass
