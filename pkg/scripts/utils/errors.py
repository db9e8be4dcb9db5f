"""Exception hierarchy shared by the kstab modules and the CLI hub."""

from __future__ import annotations

from typing import Optional


class KStabError(Exception):
    """Base class for every error raised on purpose by kstab."""


class DomainRangeError(KStabError, ValueError):
    """An abscissa or interval lies outside the domain of a curve."""


class ConsistencyError(KStabError, ValueError):
    """Two routes to the same quantity disagree, or inputs contradict each other."""


class PreconditionError(KStabError, ValueError):
    """Input data violates the preconditions of an operation."""


class CoverCompatibilityError(PreconditionError):
    """Pulling back a boundary along a cover produced a negative coefficient."""


class RationalParseError(KStabError, ValueError):
    """A string could not be read as an exact rational."""


class DescriptorError(KStabError, ValueError):
    """A pair descriptor file is malformed.

    ``field`` is the dotted path of the offending entry and ``line`` the
    1-based line number when the parser reports one.
    """

    def __init__(
        self, message: str, field: Optional[str] = None, line: Optional[int] = None
    ):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(prefix + message)
