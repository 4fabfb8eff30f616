"""
Geometry Engine Errors
Exception hierarchy shared by the jet, expression, geometry and verification layers
"""

from typing import Optional


class GeometryError(Exception):
    """Base class for every error raised by the engine"""


class SingularEvaluationError(GeometryError):
    """Evaluation left the real domain at the current point"""


class FrameDegeneracyError(SingularEvaluationError):
    """Frame matrix is singular or numerically ill-conditioned"""


class MetricSignatureError(SingularEvaluationError):
    """Metric value is not positive definite"""


class DimensionError(GeometryError):
    """Chart dimension is unsupported or inconsistent"""


class MissingPartialsError(GeometryError):
    """An operation needs first partials that were not carried by the sample"""


class ExpressionError(GeometryError):
    """Problem in an expression string, located by byte offset"""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.message = message
        self.offset = offset
        if offset is None:
            super().__init__(message)
        else:
            super().__init__(f"{message} at offset {offset}")


class ExprSyntaxError(ExpressionError):
    """Malformed expression text"""


class UnknownIdentifierError(ExpressionError):
    """Identifier is neither a coordinate, a constant nor a known function"""


class UnknownVariableError(ExpressionError):
    """Coordinate variable outside x1..xn"""


class NonConstantExponentError(ExpressionError):
    """Exponent of ^ depends on coordinates"""
