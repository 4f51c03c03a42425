"""
Dense rank-2 tensors with reverse-mode differentiation.

Every tensor is a (rows, cols) float64 matrix. Operations on tensors that
take part in a differentiable computation attach a Node to their output;
backward() collects the nodes reachable from a scalar loss into a
ComputationRecord, replays their local rules in reverse topological order
and then releases the record.
"""

import threading
from contextlib import contextmanager
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from dmtg.errors import GraphReleasedError, NonFiniteError, ShapeError

_grad_mode = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_grad_mode, "enabled", True)


@contextmanager
def no_grad():
    """Evaluate operations without recording a computation (validation, finite differences)."""
    previous = is_grad_enabled()
    _grad_mode.enabled = False
    try:
        yield
    finally:
        _grad_mode.enabled = previous


def check_finite(values: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"non-finite value produced by {where}")


class Node:
    """One recorded operation: its inputs, its output and the local backward rule."""

    __slots__ = ("op", "inputs", "output", "backward_fn", "released")

    def __init__(self, op: str, inputs: Tuple["Tensor", ...], output: "Tensor",
                 backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]):
        self.op = op
        self.inputs = inputs
        self.output = output
        self.backward_fn = backward_fn
        self.released = False

    def release(self) -> None:
        self.released = True
        self.inputs = ()
        self.backward_fn = None
        if self.output is not None:
            self.output._node = None
        self.output = None


class Tensor:
    """A (rows, cols) matrix of 64-bit reals, optionally a differentiable leaf."""

    def __init__(self, values, requires_grad: bool = False, name: Optional[str] = None):
        array = np.array(values, dtype=np.float64)
        if array.ndim == 0:
            array = array.reshape(1, 1)
        elif array.ndim == 1:
            array = array.reshape(1, -1)
        elif array.ndim > 2:
            raise ShapeError(f"tensors are at most rank 2, got shape {array.shape}")
        check_finite(array, f"Tensor({name or 'unnamed'})")

        self.values = array
        self.requires_grad = bool(requires_grad)
        self.grad = np.zeros_like(array) if self.requires_grad else None
        self.name = name
        self._node: Optional[Node] = None

    # ------------------------- Introspection -------------------------
    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def is_scalar(self) -> bool:
        return self.values.shape == (1, 1)

    @property
    def tracked(self) -> bool:
        """True when gradients can flow through this tensor."""
        return self.requires_grad or self._node is not None

    def item(self) -> float:
        if not self.is_scalar:
            raise ShapeError(f"item() needs a scalar tensor, got shape {self.shape}")
        return float(self.values[0, 0])

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.values)

    def detach(self) -> "Tensor":
        return Tensor(self.values, requires_grad=False, name=self.name)

    def copy(self) -> "Tensor":
        return Tensor(self.values, requires_grad=self.requires_grad, name=self.name)

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    # ------------------------- Operators -------------------------
    def __add__(self, other):
        from dmtg.autodiff import ops
        return ops.add(self, other)

    def __sub__(self, other):
        from dmtg.autodiff import ops
        return ops.sub(self, other)

    def __mul__(self, other):
        from dmtg.autodiff import ops
        return ops.mul(self, other)

    def __matmul__(self, other):
        from dmtg.autodiff import ops
        return ops.matmul(self, other)

    def __neg__(self):
        from dmtg.autodiff import ops
        return ops.neg(self)


def record(op: str, values: np.ndarray, inputs: Sequence[Tensor],
           backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]) -> Tensor:
    """Wrap an op result, attaching a Node when any input is tracked."""
    check_finite(values, op)
    out = Tensor.__new__(Tensor)
    out.values = values
    out.requires_grad = False
    out.grad = None
    out.name = None
    out._node = None
    if is_grad_enabled() and any(t.tracked for t in inputs):
        out._node = Node(op, tuple(inputs), out, backward_fn)
    return out


class ComputationRecord:
    """Operation nodes reachable from a loss, inputs before outputs."""

    def __init__(self, nodes: List[Node]):
        self.nodes = nodes

    @classmethod
    def from_loss(cls, loss: Tensor) -> "ComputationRecord":
        order: List[Node] = []
        visited = set()
        stack = [(loss._node, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            if node.released:
                raise GraphReleasedError(f"node '{node.op}' belongs to a graph already consumed by backward()")
            visited.add(id(node))
            stack.append((node, True))
            for parent in node.inputs:
                if parent._node is not None and id(parent._node) not in visited:
                    stack.append((parent._node, False))
        return cls(order)

    def __len__(self):
        return len(self.nodes)

    def run(self, loss: Tensor) -> None:
        pending = {id(loss): np.ones((1, 1))}
        for node in reversed(self.nodes):
            upstream = pending.pop(id(node.output), None)
            if upstream is None:
                continue
            input_grads = node.backward_fn(upstream)
            for parent, grad in zip(node.inputs, input_grads):
                if grad is None or not parent.tracked:
                    continue
                check_finite(grad, f"backward of {node.op}")
                if parent._node is not None:
                    key = id(parent)
                    if key in pending:
                        pending[key] = pending[key] + grad
                    else:
                        pending[key] = grad
                elif parent.requires_grad:
                    parent.grad += grad

    def release(self) -> None:
        for node in self.nodes:
            node.release()
        self.nodes = []


def backward(loss: Tensor) -> None:
    """Populate .grad of every leaf the scalar loss depends on (accumulating), then free the graph."""
    if not loss.is_scalar:
        raise ShapeError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if loss._node is None:
        if loss.requires_grad:
            loss.grad += 1.0
            return
        raise GraphReleasedError("loss carries no recorded computation (already released or built under no_grad)")
    computation = ComputationRecord.from_loss(loss)
    computation.run(loss)
    computation.release()
