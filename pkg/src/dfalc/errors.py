"""Exception hierarchy shared by every module."""


class DFALCError(Exception):
    """Base class for all errors raised by this package."""


class OntologySyntaxError(DFALCError, ValueError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        msg = f"line {line}, col {col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class DegreeOutOfRange(DFALCError, ValueError):
    pass


class DuplicateDeclarationKind(DFALCError, ValueError):
    pass


class UnknownName(DFALCError, KeyError):
    def __str__(self):  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class UndefinedFreshName(DFALCError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ShapeMismatch(DFALCError, ValueError):
    pass


class GroundingFormatError(DFALCError, ValueError):
    pass


class EmptyTBox(DFALCError, ValueError):
    pass


class TooLarge(DFALCError, ValueError):
    pass


class UnsupportedForm(DFALCError, ValueError):
    pass


class NonFiniteGradient(DFALCError, FloatingPointError):
    pass


class UnsatisfiableSpec(DFALCError, RuntimeError):
    pass
