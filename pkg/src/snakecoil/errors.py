"""Exception hierarchy shared by all modules."""


class ArrangementError(ValueError):
    """Base class for invalid arrangement data."""


class ChiMismatch(ArrangementError):
    pass


class DanglingContainment(ArrangementError):
    pass


class NonTransverseVertex(ArrangementError):
    pass


class CurveMismatch(ArrangementError):
    """Branch data disagrees with the declared curve metadata."""


class NotAnOval(ArrangementError):
    pass


class ParseError(ArrangementError):
    """Text input could not be parsed; carries a 1-based line and column."""

    def __init__(self, message, line=0, col=0):
        self.line = line
        self.col = col
        self.bare_message = message
        super().__init__(f"{line}:{col}: {message}" if line else message)


class InvalidWord(ParseError):
    pass


class AmbiguousEmbedding(ArrangementError):
    pass


class BadGap(ArrangementError):
    pass


class BadArc(ArrangementError):
    pass


class RegionMeetsCk(ArrangementError):
    pass


class NotFacing(ArrangementError):
    pass


class DigonOccupied(ArrangementError):
    pass


class NotMCurve(ArrangementError):
    pass


class OddDegreeUnion(ArrangementError):
    pass


class GammaMismatch(ArrangementError):
    pass


class ConditionsFail(ArrangementError):
    pass


class SchemaError(ArrangementError):
    pass


class DuplicateId(ArrangementError):
    pass
