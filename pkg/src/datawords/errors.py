"""Exception types shared across the package."""


class DatawordsError(Exception):
    pass


class EmptyWord(DatawordsError):
    pass


class NotAPartition(DatawordsError):
    pass


class UnknownLetter(DatawordsError):
    pass


class PositionOutOfRange(DatawordsError):
    pass


class ForeignValuation(DatawordsError):
    """A register valuation refers to a class that the word does not have."""


class UnboundVariable(DatawordsError):
    pass


class ParseError(DatawordsError):
    """Syntax error in one of the text formats, with a character position."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position


class UnknownAtom(ParseError):
    pass


class NotASentence(DatawordsError):
    pass


class NotSimpleFragment(DatawordsError):
    pass


class NotTwoVariable(DatawordsError):
    pass


class WrongFreeVariable(DatawordsError):
    pass


class ClassMismatch(DatawordsError):
    """An automaton does not belong to the class an operation requires."""


class UnsupportedClassCombination(DatawordsError):
    pass


class StateSpaceBudgetExceeded(DatawordsError):
    pass


class CapExceeded(DatawordsError):
    pass


class PreconditionViolation(DatawordsError):
    pass
