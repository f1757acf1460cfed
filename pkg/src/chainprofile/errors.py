"""Error classes.  Each maps to a distinct CLI exit code."""


class ChainProfileError(Exception):
    """Base class; generic failures exit with code 1."""
    exit_code = 1


class ParseError(ChainProfileError):
    """Malformed presentation, word, chain literal, or input file."""
    exit_code = 2


class InputError(ParseError):
    """Well-formed input with invalid content (bad table, missing entries)."""


class AlphabetError(ParseError):
    """Operation mixing words over different generator alphabets."""


class OracleUndecidedError(ChainProfileError):
    """An equality the operation needed came back Undecided."""
    exit_code = 3


class BudgetExceededError(ChainProfileError):
    """Volume cap or node cap exhausted before the answer was reached."""
    exit_code = 4


class InvalidSkeletonError(ChainProfileError):
    """Skeleton validation failed (boundary of boundary nonzero, bad refs)."""
    exit_code = 5


class WrongAlgorithmError(ChainProfileError):
    """Query routed to an algorithm whose preconditions the input violates."""
    exit_code = 6
