"""Exception types shared across the library."""

from __future__ import annotations


class WindensityError(Exception):
    """Base class for all library-specific errors."""


class HorizonError(WindensityError):
    """A query needs elements beyond a set's certified enumeration horizon."""


class ScanCapError(WindensityError):
    """An exact scan exhausted its index cap without reaching a certificate."""


class FamilyRangeError(WindensityError):
    """A window index lies outside a bounded family's declared range."""


class FormatError(WindensityError):
    """A text input (.iset/.fam/.seq) failed to parse.

    Carries the 1-based line number when the failure is line-local.
    """

    def __init__(self, message: str, *, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += path
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class EvaluationRangeError(WindensityError):
    """A sequence was evaluated beyond its defined index range."""


class PseudoUnionError(WindensityError):
    """A pseudo-union member never met its tolerance within the sampled grid."""

    def __init__(self, message: str, *, member: int):
        self.member = member
        super().__init__(message)
