"""
Finite-Difference Gradient Check

Compares tape gradients with central differences, entry by entry.
"""

import math
from typing import Callable, Sequence

import numpy as np

from autodiff.tensor import Tape, Tensor, backward
from config.constants import DEFAULT_FD_STEP, FD_DENOMINATOR_FLOOR
from utils.errors import GradientError


def _evaluate(f: Callable[[Sequence[Tensor]], Tensor], params: Sequence[Tensor]) -> float:
    value = f(params).item()
    if not math.isfinite(value):
        raise GradientError(f"Objective is not finite: {value}")
    return value


def finite_difference_check(
    f: Callable[[Sequence[Tensor]], Tensor],
    params: Sequence[Tensor],
    h: float = DEFAULT_FD_STEP,
) -> float:
    """
    Worst relative error between analytic and numeric gradients.

    The analytic gradient comes from one recorded forward pass and backward.
    Each entry's numeric gradient is (f(theta + h) - f(theta - h)) / 2h with
    the tape inactive. Errors are |a - n| / max(1e-8, |a| + |n|).

    Args:
        f: Maps the parameter list to a scalar Tensor; must be deterministic
        params: Tensors with requires_grad=True
        h: Step size (> 0)

    Returns:
        Maximum relative error over all parameter entries

    Raises:
        GradientError: If h <= 0, a parameter does not require grad, or f is not finite
    """
    if h <= 0:
        raise GradientError(f"Finite-difference step must be positive, got {h}")
    for p in params:
        if not p.requires_grad:
            raise GradientError(f"Parameter {p.name or p.shape} does not require grad")
        p.zero_grad()

    tape = Tape()
    with tape.recording():
        loss = f(params)
    if not math.isfinite(loss.item()):
        raise GradientError(f"Objective is not finite: {loss.item()}")
    if loss._node is not None:
        backward(loss)
    tape.clear()
    analytic = [p.grad.copy() for p in params]

    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.data.reshape(-1)
        flat_grad = grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            plus = _evaluate(f, params)
            flat[i] = original - h
            minus = _evaluate(f, params)
            flat[i] = original
            numeric = (plus - minus) / (2.0 * h)
            denom = max(FD_DENOMINATOR_FLOOR, abs(flat_grad[i]) + abs(numeric))
            worst = max(worst, abs(flat_grad[i] - numeric) / denom)

    for p in params:
        p.zero_grad()
    return float(worst)


def analytic_gradients(f: Callable[[Sequence[Tensor]], Tensor], params: Sequence[Tensor]) -> list:
    """Gradients of f at params from one recorded pass (params' grads are reset)."""
    for p in params:
        p.zero_grad()
    tape = Tape()
    with tape.recording():
        loss = f(params)
    if loss._node is not None:
        backward(loss)
    tape.clear()
    grads = [np.array(p.grad, copy=True) for p in params]
    for p in params:
        p.zero_grad()
    return grads
