"""Exception hierarchy shared by all homcirc modules."""


class HomcircError(Exception):
    """Base class for every error raised by the package."""


class InvalidInstance(HomcircError):
    """The embedded digraph violates one of its structural invariants."""


class InvalidInput(HomcircError):
    """A solver input (circulation, costs, flags) is unusable."""


class ParseError(InvalidInstance):
    """An instance or circulation file could not be read.

    ``field`` names the offending JSON path when it is known.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class SchemaVersionMismatch(ParseError):
    pass


class NotACirculation(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class InternalInconsistency(HomcircError):
    """A mathematical invariant failed; indicates a corrupted instance or a bug."""


class NotOrientable(HomcircError):
    pass


class OrientableInput(HomcircError):
    pass


class NonIntegralVertex(InternalInconsistency):
    pass


class GenusCapExceeded(HomcircError):
    pass


class BoxTooLarge(HomcircError):
    pass


class BadParams(HomcircError):
    pass


class BipartiteInput(HomcircError):
    pass
