"""
Engine Errors
=============
One hierarchy. Every failure has a name.
"""

from typing import Optional


class JacobiEngineError(Exception):
    """Base class for everything the engine raises"""


class DivisionByZero(JacobiEngineError):
    """Divisor reduces to zero modulo the constraint context"""


class ContextMismatch(JacobiEngineError):
    """Operands live in different constraint contexts"""


class UnknownSymbol(JacobiEngineError):
    """Symbol is not a coordinate (or not allowed) in this context"""


class ParseError(JacobiEngineError):
    """Expression text could not be parsed"""

    def __init__(self, message: str, column: Optional[int] = None):
        self.column = column
        if column is not None:
            message = f"{message} (at column {column})"
        super().__init__(message)


class NoSolution(JacobiEngineError):
    """Linear system is inconsistent"""


class ChartMismatch(JacobiEngineError):
    """Tensors live on different charts"""


class DegreeTooLow(JacobiEngineError):
    """Form degree too small for the requested contraction"""


class NotContact(JacobiEngineError):
    """theta ^ (d theta)^n vanishes identically or at the witness point"""


class EvenDimension(JacobiEngineError):
    """Contact structures need an odd-dimensional chart"""


class SolveFailed(JacobiEngineError):
    """Reeb system has no unique solution"""


class NotTopForm(JacobiEngineError):
    """Expected a top-degree form"""


class NotCasimirFunction(JacobiEngineError):
    """Conformal factor does not depend on p.p alone"""


class NotMultiplication(JacobiEngineError):
    """k-fold commutator still carries derivatives"""


class NonConstantCoefficients(JacobiEngineError):
    """Operator coefficients depend on the chart coordinates"""


class ConstructionError(JacobiEngineError):
    """A model failed one of its defining identities while being built"""


class OperationCancelled(JacobiEngineError):
    """Caller cancelled a long-running contraction"""


class UsageError(JacobiEngineError):
    """Bad command-line input"""
