"""
Error Types

Exception hierarchy shared by every package. The CLI maps
DataValidationError to exit code 2 and ArtifactIOError to exit code 1.
"""

from typing import Any, Optional


class LexSpecError(Exception):
    """Base class for all toolkit errors"""


class DataValidationError(LexSpecError, ValueError):
    """Input violates a documented precondition or file schema"""


class ShapeError(DataValidationError):
    """Tensor shapes are incompatible for the requested primitive"""


class ArtifactIOError(LexSpecError, OSError):
    """An artifact could not be read or written"""


class GradientError(LexSpecError, RuntimeError):
    """Autodiff misuse: non-scalar backward, cleared tape, non-finite values"""


class TrainingDiverged(LexSpecError, RuntimeError):
    """
    Training hit a non-finite loss.

    The best result obtained before the failure is kept on `result`.
    """

    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result


class NumericalError(DataValidationError):
    """An operation is undefined for its input (log of x <= 0, zero-norm vector)"""
