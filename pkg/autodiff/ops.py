"""
Primitive Operations

The closed set of differentiable primitives used by the encoder and the
contrastive loss. There is no generic broadcasting: every primitive states
the shapes it accepts and raises ShapeError otherwise.
"""

from typing import Optional, Sequence

import numpy as np

from autodiff.tensor import Tensor, record
from utils.errors import NumericalError, ShapeError


def _shapes(*tensors: Tensor) -> str:
    return " and ".join(str(t.shape) for t in tensors)


def gather_rows(table: Tensor, ids: Sequence[int]) -> Tensor:
    """
    Select rows of a 2-D table: (V, d), n ids -> (n, d).

    Repeated ids are allowed; their gradients add up.
    """
    if table.data.ndim != 2:
        raise ShapeError(f"gather_rows needs a 2-D table, got {table.shape}")
    index = np.asarray(ids, dtype=np.int64).reshape(-1)
    if index.size and (index.min() < 0 or index.max() >= table.shape[0]):
        raise ShapeError(f"gather_rows ids out of range for table {table.shape}")

    def _bw(g):
        grad = np.zeros_like(table.data)
        np.add.at(grad, index, g)
        return (grad,)

    return record("gather_rows", (table,), table.data[index], _bw)


def matmul(a: Tensor, b: Tensor, transpose_b: bool = False) -> Tensor:
    """(n, k) @ (k, m) -> (n, m); with transpose_b, b is (m, k)."""
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul needs 2-D operands, got {_shapes(a, b)}")
    rhs = b.data.T if transpose_b else b.data
    if a.shape[1] != rhs.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {_shapes(a, b)} (transpose_b={transpose_b})")

    def _bw(g):
        grad_a = g @ rhs.T
        grad_b = (g.T @ a.data) if transpose_b else (a.data.T @ g)
        return grad_a, grad_b

    return record("matmul", (a, b), a.data @ rhs, _bw)


def add(a: Tensor, b: Tensor) -> Tensor:
    """
    Elementwise sum of equal shapes, or (n, d) + (d,) row bias.
    """
    if a.shape == b.shape:
        return record("add", (a, b), a.data + b.data, lambda g: (g, g))
    if a.data.ndim == 2 and b.data.ndim == 1 and a.shape[1] == b.shape[0]:
        return record("add", (a, b), a.data + b.data, lambda g: (g, g.sum(axis=0)))
    raise ShapeError(f"add needs equal shapes or (n, d) + (d,), got {_shapes(a, b)}")


def mul_elementwise(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise product of equal shapes."""
    if a.shape != b.shape:
        raise ShapeError(f"mul_elementwise needs equal shapes, got {_shapes(a, b)}")
    return record(
        "mul_elementwise", (a, b), a.data * b.data, lambda g: (g * b.data, g * a.data)
    )


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply by a constant."""
    factor = float(factor)
    return record("scale", (a,), a.data * factor, lambda g: (g * factor,))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0.0
    return record("relu", (a,), np.where(mask, a.data, 0.0), lambda g: (g * mask,))


def softmax_lastaxis(a: Tensor) -> Tensor:
    """Numerically stable softmax over the last axis."""
    if a.data.ndim == 0:
        raise ShapeError("softmax_lastaxis needs at least one axis")
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)

    def _bw(g):
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return record("softmax_lastaxis", (a,), s, _bw)


def mean_axis(a: Tensor, axis: Optional[int] = None) -> Tensor:
    """Mean over one axis, or over all entries when axis is None (scalar)."""
    if a.size == 0:
        raise ShapeError(f"mean_axis of an empty tensor {a.shape}")
    if axis is None:
        count = a.size
        return record(
            "mean_axis", (a,), np.asarray(a.data.mean()),
            lambda g: (np.full_like(a.data, float(g) / count),),
        )
    if not -a.data.ndim <= axis < a.data.ndim:
        raise ShapeError(f"mean_axis axis {axis} out of range for {a.shape}")
    count = a.shape[axis]

    def _bw(g):
        return (np.broadcast_to(np.expand_dims(g, axis) / count, a.shape).copy(),)

    return record("mean_axis", (a,), a.data.mean(axis=axis), _bw)


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    """Stack (n_i, d) blocks or (d,) rows into a (sum n_i, d) matrix."""
    if not parts:
        raise ShapeError("concat_rows needs at least one tensor")
    blocks = [p.data.reshape(1, -1) if p.data.ndim == 1 else p.data for p in parts]
    widths = {blk.shape[1] for blk in blocks if blk.ndim == 2}
    if any(blk.ndim != 2 for blk in blocks) or len(widths) != 1:
        raise ShapeError(f"concat_rows needs equal row widths, got {_shapes(*parts)}")
    offsets = np.cumsum([0] + [blk.shape[0] for blk in blocks])

    def _bw(g):
        return tuple(
            g[offsets[i]:offsets[i + 1]].reshape(p.shape) for i, p in enumerate(parts)
        )

    return record("concat_rows", tuple(parts), np.concatenate(blocks, axis=0), _bw)


def l2_normalize(a: Tensor) -> Tensor:
    """Scale each vector along the last axis to unit norm."""
    norms = np.linalg.norm(a.data, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise NumericalError(f"l2_normalize of a zero-norm vector (shape {a.shape})")
    y = a.data / norms

    def _bw(g):
        return ((g - y * (g * y).sum(axis=-1, keepdims=True)) / norms,)

    return record("l2_normalize", (a,), y, _bw)


def cosine(a: Tensor, b: Tensor) -> Tensor:
    """Cosine of two (d,) vectors -> scalar, or row-wise for (n, d) -> (n,)."""
    if a.shape != b.shape or a.data.ndim not in (1, 2):
        raise ShapeError(f"cosine needs equal 1-D or 2-D shapes, got {_shapes(a, b)}")
    na = np.linalg.norm(a.data, axis=-1, keepdims=True)
    nb = np.linalg.norm(b.data, axis=-1, keepdims=True)
    if np.any(na == 0.0) or np.any(nb == 0.0):
        raise NumericalError("cosine of a zero-norm vector is undefined")
    dot = (a.data * b.data).sum(axis=-1, keepdims=True)
    c = dot / (na * nb)

    def _bw(g):
        gk = np.asarray(g).reshape(c.shape)
        grad_a = gk * (b.data / (na * nb) - c * a.data / na ** 2)
        grad_b = gk * (a.data / (na * nb) - c * b.data / nb ** 2)
        return grad_a, grad_b

    out = c.reshape(()) if a.data.ndim == 1 else c.reshape(-1)
    return record("cosine", (a, b), out, _bw)


def exp(a: Tensor) -> Tensor:
    e = np.exp(a.data)
    return record("exp", (a,), e, lambda g: (g * e,))


def log(a: Tensor) -> Tensor:
    if np.any(a.data <= 0.0):
        raise NumericalError("log of a non-positive value")
    return record("log", (a,), np.log(a.data), lambda g: (g / a.data,))
