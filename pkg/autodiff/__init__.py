"""Reverse-mode automatic differentiation over dense float64 tensors"""

from autodiff.tensor import Tape, Tensor, backward
from autodiff import ops
from autodiff.gradcheck import finite_difference_check

__all__ = ["Tape", "Tensor", "backward", "ops", "finite_difference_check"]
