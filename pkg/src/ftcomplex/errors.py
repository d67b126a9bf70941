"""Exception hierarchy shared by all ftcomplex modules."""


class FTCError(Exception):
    """Base class for library errors."""


class DimsTooSmall(FTCError):
    pass


class MalformedTemplate(FTCError):
    pass


class NotBicolorable(FTCError):
    pass


class VerticesNotBicolorable(NotBicolorable):
    pass


class NotAClosedSurface(FTCError):
    pass


class EmptyRegion(FTCError):
    pass


class FullRegion(FTCError):
    pass


class LengthMismatch(FTCError):
    pass


class InvalidComplex(FTCError):
    pass


class InvalidColoring(FTCError):
    pass


class InvalidColorComplex(FTCError):
    pass


class HomologyRankUnexpected(FTCError):
    pass


class UnsatisfiableSyndrome(FTCError):
    pass


class ConfigInvalid(FTCError):
    pass


class NoCrossingInGrid(FTCError):
    pass


class UnknownName(FTCError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(FTCError, ValueError):
    """Syntax-level failure; ``where`` names the line or field."""

    def __init__(self, message, where=None):
        self.where = where
        if where is not None:
            message = f"{where}: {message}"
        super().__init__(message)


class ConsistencyError(ParseError):
    pass


class NonGeneric(FTCError):
    def __init__(self, message, planes=()):
        self.planes = tuple(planes)
        super().__init__(message)


class Unbounded(FTCError):
    pass
