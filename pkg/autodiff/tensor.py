"""
Tensor and Tape

A Tensor wraps a float64 numpy array. Operations executed while a Tape is
recording, with at least one input that requires a gradient, append a node
to the tape; `backward` replays the tape in reverse.
"""

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import GradientError

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """Dense row-major float64 tensor with an optional gradient accumulator"""

    def __init__(self, values, requires_grad: bool = False, name: Optional[str] = None):
        self.data: np.ndarray = np.array(values, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = np.zeros_like(self.data) if self.requires_grad else None
        self.name = name
        self._node: Optional["Node"] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._node is None

    def item(self) -> float:
        if self.data.size != 1:
            raise GradientError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def set_requires_grad(self, flag: bool) -> None:
        """Toggle trainability; the accumulator exists iff requires_grad."""
        self.requires_grad = bool(flag)
        self.grad = np.zeros_like(self.data) if self.requires_grad else None

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad[...] = 0.0

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        req = ", requires_grad=True" if self.requires_grad else ""
        nm = f", name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}{req}{nm})"

    # Operator sugar over the primitive set
    def __add__(self, other: "Tensor") -> "Tensor":
        from autodiff import ops
        return ops.add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        from autodiff import ops
        return ops.add(self, ops.scale(other, -1.0))

    def __mul__(self, other: "Tensor") -> "Tensor":
        from autodiff import ops
        if isinstance(other, (int, float)):
            return ops.scale(self, float(other))
        return ops.mul_elementwise(self, other)

    def __neg__(self) -> "Tensor":
        from autodiff import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from autodiff import ops
        return ops.matmul(self, other)


@dataclass
class Node:
    """One recorded operation"""
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward_fn: BackwardFn
    tape: "Tape"
    index: int


class Tape:
    """Ordered record of operations for one training step"""

    def __init__(self):
        self.nodes: List[Node] = []
        self.cleared = False

    def __len__(self) -> int:
        return len(self.nodes)

    @contextmanager
    def recording(self) -> Iterator["Tape"]:
        if self.cleared:
            raise GradientError("Cannot record on a cleared tape")
        _ACTIVE_TAPES.append(self)
        try:
            yield self
        finally:
            _ACTIVE_TAPES.pop()

    def clear(self) -> None:
        """Drop all nodes; tensors produced on this tape can no longer backpropagate."""
        self.cleared = True
        self.nodes = []


_ACTIVE_TAPES: List[Tape] = []


def active_tape() -> Optional[Tape]:
    return _ACTIVE_TAPES[-1] if _ACTIVE_TAPES else None


def record(op: str, inputs: Sequence[Tensor], out_data: np.ndarray, backward_fn: BackwardFn) -> Tensor:
    """
    Wrap a forward result and, when appropriate, record it on the active tape.

    Args:
        op: Primitive name
        inputs: Input tensors in the order backward_fn returns their gradients
        out_data: Forward value
        backward_fn: Maps the output gradient to one gradient (or None) per input

    Returns:
        Output tensor
    """
    tape = active_tape()
    needs_grad = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=False)
    if not needs_grad:
        return out

    out.requires_grad = True
    node = Node(
        op=op,
        inputs=tuple(inputs),
        output=out,
        backward_fn=backward_fn,
        tape=tape,
        index=len(tape.nodes),
    )
    tape.nodes.append(node)
    out._node = node
    return out


def backward(loss: Tensor) -> None:
    """
    Accumulate d(loss)/d(leaf) into the `grad` of every leaf requiring grad.

    Intermediate tensors receive the gradient of the latest backward call in
    `grad` (overwritten, not accumulated).

    Raises:
        GradientError: If loss is not scalar, was not recorded, or its tape was cleared
    """
    if loss.size != 1:
        raise GradientError(f"backward() needs a scalar loss, got shape {loss.shape}")
    node = loss._node
    if node is None:
        raise GradientError("Loss was not produced by tape-recorded operations")
    tape = node.tape
    if tape.cleared or node.index >= len(tape.nodes) or tape.nodes[node.index] is not node:
        raise GradientError("Cannot backpropagate through a cleared tape")

    pending = {id(loss): np.ones_like(loss.data)}
    for current in reversed(tape.nodes[: node.index + 1]):
        grad_out = pending.pop(id(current.output), None)
        if grad_out is None:
            continue
        current.output.grad = grad_out
        input_grads = current.backward_fn(grad_out)
        for tensor, grad in zip(current.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            if tensor.is_leaf:
                tensor.grad += grad
            elif id(tensor) in pending:
                pending[id(tensor)] = pending[id(tensor)] + grad
            else:
                pending[id(tensor)] = grad
