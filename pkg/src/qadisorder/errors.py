"""Exception types raised across the package.

Errors split into two families so the command line can map them onto exit
codes: ``DataError`` (bad or inconsistent input, exit 2) and
``ComputeError`` (a computation could not be carried out, exit 3).
Plain argument mistakes raise ``ValueError``.
"""

from __future__ import annotations


class QADisorderError(Exception):
    """Base class for all package errors."""


class DataError(QADisorderError):
    pass


class ComputeError(QADisorderError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class SchemaError(DataError):
    pass


class ConsistencyError(DataError):
    """A configuration energy matched no level of the supplied spectrum."""


class AlignmentError(DataError):
    pass


class CapabilityError(ComputeError):
    """Problem too large for exhaustive enumeration."""


class DegenerateSpectrumError(ComputeError):
    pass


class UnfittableError(ComputeError):
    """Empirical mean energy sits at a spectral extreme (beta = +/- inf)."""


class ConvergenceError(ComputeError):
    pass
