class QCharError(Exception):
    """Base class for every error raised by qchar_project."""


class ConfigError(QCharError):
    """Invalid run configuration (window, degcap, qmode, ...)."""


class ParseError(QCharError):
    """Text input could not be parsed.

    Args:
        message (str): What went wrong.
        text (str): The input being parsed.
        position (int): Offset of the offending character in ``text``.
    """

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class ParityError(QCharError):
    """A spectral exponent sits on the wrong parity component."""


class UnknownNodeError(QCharError):
    """A node index outside the Cartan type was used."""


class NotNegativeError(QCharError):
    """An l-weight is not a negative l-weight (a Psi^{+1} factor remains)."""


class UntrackedRegionError(QCharError):
    """A coefficient was requested outside the tracked window/degcap."""


class TruncationError(QCharError):
    """An exact action would leave the declared truncation."""


class DimensionBoundError(QCharError):
    """A tensor product would exceed QCHAR_MAX_TENSOR_DIM."""


class StabilizationError(QCharError):
    """A sequence of series did not stabilize before the give-up bound."""


class InconsistencyError(QCharError):
    """A relation that must hold as a matrix identity failed."""


class UnmatchedEigenvalueError(QCharError):
    """A joint eigenvalue sequence matched no candidate l-weight."""


class DiagonalizationError(QCharError):
    """h-eigenvectors of T are not unitriangular in the subset order."""


class OrderSizeError(QCharError):
    """Subsets of different cardinality were compared."""


class GapError(QCharError):
    """A tuple violates the gap condition r_1 >= 1, r_{i+1} >= r_i + 2."""


class RewriteBudgetError(QCharError):
    """PBW rewriting exceeded its step budget."""


class OverflowBoundError(QCharError):
    """A value exceeded the configured integer bounds."""


class SpecializationError(QCharError, ZeroDivisionError):
    """Evaluation at q = q0 is undefined."""


class WeightError(QCharError):
    """The weight part of an l-weight is not an integer where one is needed."""
