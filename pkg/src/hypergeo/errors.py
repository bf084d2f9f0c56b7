"""Exception hierarchy shared by all modules."""


class HypergeoError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HypergeoError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class NotCyclotomicProduct(HypergeoError):
    pass


class ZeroDifference(HypergeoError):
    pass


class HypothesisViolation(HypergeoError):
    def __init__(self, message, failing=()):
        self.failing = tuple(failing)
        super().__init__(message)


# linear algebra
class Singular(HypergeoError):
    pass


class DimensionMismatch(HypergeoError):
    pass


class NotUnipotent(HypergeoError):
    pass


# monodromy
class NotMonic(HypergeoError):
    pass


class NoInvariantForm(HypergeoError):
    pass


class NonUniqueForm(HypergeoError):
    pass


class DegenerateForm(HypergeoError):
    pass


class NotTransvection(HypergeoError):
    pass


# criterion
class TripleDegenerate(HypergeoError):
    pass


class InternalInconsistency(HypergeoError):
    pass


class UnsupportedC(HypergeoError):
    pass


# witness
class UnboundSymbol(HypergeoError):
    pass


class DegenerateFlag(HypergeoError):
    pass


class ShapeMismatch(HypergeoError):
    pass


class InsufficientClosure(HypergeoError):
    def __init__(self, dim, expected):
        self.dim = dim
        self.expected = expected
        super().__init__(f"Lie closure has dimension {dim}, expected {expected}")
