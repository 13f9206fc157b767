"""Exception hierarchy shared by every omega_tower module."""

from __future__ import annotations


class OmegaTowerError(Exception):
    """Root of all library errors."""


class ParseError(OmegaTowerError):
    """Raised when text does not match one of the canonical grammars."""

    def __init__(self, reason: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"{line}:{column}: {reason}")
        self.reason = reason
        self.line = line
        self.column = column


class OrdinalParseError(ParseError):
    """Ordinal text is not in the notation grammar."""


class CnfViolation(OrdinalParseError):
    """Ordinal text parses but is not in Cantor normal form."""


class NotALimitError(OmegaTowerError, ValueError):
    """A limit ordinal was required."""


class NotTrustedError(OmegaTowerError):
    """The belief base does not trust the given verifier."""


class CorpusError(OmegaTowerError):
    """Corpus manifest or config file is missing or malformed."""
