"""Exception hierarchy shared by all modules."""


class MilnorWittError(Exception):
    """Base class; the CLI maps every subclass to exit code 1."""


class ZeroElement(MilnorWittError, ValueError):
    pass


class DividesModulus(MilnorWittError, ValueError):
    pass


class UnsupportedField(MilnorWittError):
    pass


class UnsupportedPlace(MilnorWittError):
    pass


class FieldMismatch(MilnorWittError, ValueError):
    pass


class FactorizationError(MilnorWittError):
    """Trial division ran past its bound without completing."""


class NotIrreducible(MilnorWittError, ValueError):
    pass


class Degenerate(MilnorWittError, ValueError):
    pass


class IsotropicVector(MilnorWittError, ValueError):
    pass


class NotRepresented(MilnorWittError, ValueError):
    pass


class ParityMismatch(MilnorWittError, ValueError):
    pass


class NotInPower(MilnorWittError, ValueError):
    pass


class DimensionMismatch(MilnorWittError, ValueError):
    pass


class IllDefinedHom(MilnorWittError):
    pass


class TargetMismatch(MilnorWittError, ValueError):
    pass


class MixedDegree(MilnorWittError, ValueError):
    pass


class TruncationOverflow(MilnorWittError):
    pass


class LengthMismatch(MilnorWittError, ValueError):
    pass


class IsometryFails(MilnorWittError):
    pass


class ParseError(MilnorWittError, ValueError):
    def __init__(self, message, text="", position=None, expected=None):
        self.text = text
        self.position = position
        self.expected = expected
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}" + (f" (expected {expected})" if expected else ""))


class NotFoundWithinSupport(MilnorWittError):
    """Chain search exhausted its square-class support; says nothing about non-equivalence."""
