"""Exception hierarchy shared by every module."""


class MeroError(Exception):
    """Base class for library errors."""


class DivisionByZero(MeroError, ZeroDivisionError):
    pass


class NotSquarefree(MeroError):
    pass


class NotMonic(MeroError):
    pass


class PrecisionExhausted(MeroError):
    """A truncated series does not determine the requested quantity."""


class PrecisionCapExceeded(MeroError):
    """Adaptive refinement hit its hard cap."""


class NotOnEdge(MeroError):
    pass


class ZeroArgument(MeroError):
    pass


class ZeroPolynomial(MeroError):
    pass


class ConstantInput(MeroError):
    """Input lies in k((X)), i.e. has no Y-dependence."""


class HypothesisNotMet(MeroError):
    """A theorem's hypothesis fails; the CLI maps this to exit status 2."""


class MultipleFactors(HypothesisNotMet):
    pass


class ZeroG(HypothesisNotMet):
    pass


class ParseError(MeroError, SyntaxError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class NegativeYExponent(ParseError):
    pass
