"""Exception hierarchy shared by every dqaudit module."""


class DQError(Exception):
    """Base class for all errors raised by dqaudit."""


# ingestion

class ReadError(DQError, OSError):
    """A source file could not be opened or read."""


class EncodingError(DQError, ValueError):
    """A source file is not valid UTF-8."""


class EmptyInputError(DQError, ValueError):
    """A file expected to carry a header row is empty."""


class ParseError(DQError, ValueError):
    """Malformed schema or rule text, with a 1-based line/column position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class UnknownAttributeError(ParseError):
    pass


class ConflictingRuleError(ParseError):
    pass


# checks and analytics

class NoKeyDefinedError(DQError, ValueError):
    pass


class MissingColumnError(DQError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing column"


class RuleBindingError(DQError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "rule binding failed"


class NonOrderableError(DQError, TypeError):
    pass


class NotNumericError(DQError, TypeError):
    pass


class TooFewValuesError(DQError, ValueError):
    pass


class BadBandsError(DQError, ValueError):
    pass


class LengthMismatchError(DQError, ValueError):
    pass


# compare

class ShapeMismatchError(DQError, ValueError):
    pass


class DuplicateKeyError(DQError, ValueError):
    pass


# generate

class UnsatisfiableSpecError(DQError, ValueError):
    pass


class NothingEligibleError(DQError, ValueError):
    pass


class LogMismatchError(DQError, ValueError):
    pass


# report

class WriteError(DQError, OSError):
    pass
