"""Exception types shared across the package."""


class FieldMismatch(ValueError):
    """Operands belong to different fields (or curves)."""


class DivisionByZero(ZeroDivisionError):
    """Division by the zero element, polynomial or function."""


class ZeroPolynomial(ValueError):
    """Operation undefined for the zero polynomial."""


class PointOffCurve(ValueError):
    """Coordinates do not satisfy the curve equation."""


class NonZeroDegree(ValueError):
    """A degree-zero divisor was required."""


class BaseChangeRequired(Exception):
    """Data is not rational over the current field.

    `degree` is the minimal extension degree (over the current field) that
    makes the offending places rational.
    """

    def __init__(self, degree, message=""):
        self.degree = degree
        super().__init__(message or f"base change of degree {degree} required")


class ZeroFunction(ValueError):
    """Operation undefined for the zero function."""


class IdenticallyZeroWedge(Exception):
    """The requested wedge of sections vanishes identically."""


class TopWedgeVanishes(Exception):
    """The top wedge of the section basis is the zero section."""


class SectionCountMismatch(Exception):
    """Section count differs from the declared rank."""

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected {expected} sections, found {actual}")


class DimensionMismatch(Exception):
    """A computed linear space has unexpected dimension."""

    def __init__(self, expected, actual, message=""):
        self.expected = expected
        self.actual = actual
        super().__init__(message or f"expected dimension {expected}, got {actual}")


class InternalInconsistency(Exception):
    """Two independent computations disagree; indicates a bug, never input."""


class ParseError(ValueError):
    """Job-file syntax error with position information."""

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
