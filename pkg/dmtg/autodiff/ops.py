"""
Differentiable operations on rank-2 tensors.

Binary operations require identical shapes; there is no broadcasting.
Use replicate_rows() to expand a 1 x c row (a bias, say) to n x c.
"""

from typing import Optional, Sequence, Union

import numpy as np

from dmtg.autodiff.tensor import Tensor, record
from dmtg.errors import DomainError, ShapeError

ArrayLike = Union[Tensor, np.ndarray, float, Sequence]

BINARY_KINDS = ("add", "sub", "mul")
UNARY_KINDS = ("relu", "tanh", "exp", "log", "neg", "scale")
REDUCTION_KINDS = ("sum", "mean", "row_mean")


def constant(values: ArrayLike) -> Tensor:
    if isinstance(values, Tensor):
        return values
    return Tensor(values, requires_grad=False)


def _same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


# ------------------------- Linear algebra -------------------------
def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = constant(a), constant(b)
    if a.cols != b.rows:
        raise ShapeError(f"matmul: {a.shape} @ {b.shape} has mismatched inner dimension")
    av, bv = a.values, b.values

    def backward(g):
        return g @ bv.T, av.T @ g

    return record("matmul", av @ bv, (a, b), backward)


def transpose(a: ArrayLike) -> Tensor:
    a = constant(a)
    return record("transpose", a.values.T.copy(), (a,), lambda g: (g.T,))


# ------------------------- Elementwise -------------------------
def elementwise(a: ArrayLike, b: ArrayLike, kind: str) -> Tensor:
    a, b = constant(a), constant(b)
    _same_shape(a, b, kind)
    av, bv = a.values, b.values
    if kind == "add":
        return record("add", av + bv, (a, b), lambda g: (g, g))
    if kind == "sub":
        return record("sub", av - bv, (a, b), lambda g: (g, -g))
    if kind == "mul":
        return record("mul", av * bv, (a, b), lambda g: (g * bv, g * av))
    raise DomainError(f"unknown binary kind '{kind}', expected one of {BINARY_KINDS}")


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    return elementwise(a, b, "add")


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    return elementwise(a, b, "sub")


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    return elementwise(a, b, "mul")


def unary(a: ArrayLike, kind: str, c: Optional[float] = None) -> Tensor:
    a = constant(a)
    av = a.values
    if kind == "relu":
        mask = av > 0
        return record("relu", np.where(mask, av, 0.0), (a,), lambda g: (g * mask,))
    if kind == "tanh":
        out = np.tanh(av)
        return record("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))
    if kind == "exp":
        with np.errstate(over="ignore"):
            out = np.exp(av)
        return record("exp", out, (a,), lambda g: (g * out,))
    if kind == "log":
        if np.any(av <= 0):
            raise DomainError("log: all entries must be strictly positive")
        return record("log", np.log(av), (a,), lambda g: (g / av,))
    if kind == "neg":
        return record("neg", -av, (a,), lambda g: (-g,))
    if kind == "scale":
        if c is None:
            raise DomainError("scale needs a constant factor c")
        factor = float(c)
        return record("scale", av * factor, (a,), lambda g: (g * factor,))
    raise DomainError(f"unknown unary kind '{kind}', expected one of {UNARY_KINDS}")


def relu(a: ArrayLike) -> Tensor:
    return unary(a, "relu")


def tanh(a: ArrayLike) -> Tensor:
    return unary(a, "tanh")


def exp(a: ArrayLike) -> Tensor:
    return unary(a, "exp")


def log(a: ArrayLike) -> Tensor:
    return unary(a, "log")


def neg(a: ArrayLike) -> Tensor:
    return unary(a, "neg")


def scale(a: ArrayLike, c: float) -> Tensor:
    return unary(a, "scale", c)


# ------------------------- Softmax -------------------------
def row_softmax(a: ArrayLike) -> Tensor:
    """Softmax of every row, stabilized by subtracting the row max."""
    a = constant(a)
    shifted = a.values - a.values.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=1, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=1, keepdims=True)),)

    return record("row_softmax", out, (a,), backward)


# ------------------------- Reductions -------------------------
def reduce(a: ArrayLike, kind: str) -> Tensor:
    a = constant(a)
    rows, cols = a.shape
    if kind == "sum":
        return record("sum", np.array([[a.values.ravel().sum()]]), (a,),
                      lambda g: (np.full((rows, cols), g[0, 0]),))
    if kind == "mean":
        count = rows * cols
        if count == 0:
            raise ShapeError("mean of an empty tensor")
        return record("mean", np.array([[a.values.ravel().mean()]]), (a,),
                      lambda g: (np.full((rows, cols), g[0, 0] / count),))
    if kind == "row_mean":
        if cols == 0:
            raise ShapeError("row_mean of a tensor without columns")
        return record("row_mean", a.values.mean(axis=1, keepdims=True), (a,),
                      lambda g: (np.repeat(g / cols, cols, axis=1),))
    raise DomainError(f"unknown reduction '{kind}', expected one of {REDUCTION_KINDS}")


def sum_all(a: ArrayLike) -> Tensor:
    return reduce(a, "sum")


def mean(a: ArrayLike) -> Tensor:
    return reduce(a, "mean")


def row_mean(a: ArrayLike) -> Tensor:
    return reduce(a, "row_mean")


# ------------------------- Shape plumbing -------------------------
def replicate_rows(a: ArrayLike, n: int) -> Tensor:
    """Repeat a single-row tensor n times (the explicit stand-in for broadcasting)."""
    a = constant(a)
    if a.rows != 1:
        raise ShapeError(f"replicate_rows expects a 1 x c row, got {a.shape}")
    return record("replicate_rows", np.repeat(a.values, n, axis=0), (a,),
                  lambda g: (g.sum(axis=0, keepdims=True),))


def column(a: ArrayLike, j: int) -> Tensor:
    a = constant(a)
    if not 0 <= j < a.cols:
        raise ShapeError(f"column {j} out of range for shape {a.shape}")
    rows, cols = a.shape

    def backward(g):
        full = np.zeros((rows, cols))
        full[:, j:j + 1] = g
        return (full,)

    return record("column", a.values[:, j:j + 1].copy(), (a,), backward)


def vstack(parts: Sequence[ArrayLike]) -> Tensor:
    parts = [constant(p) for p in parts]
    if not parts:
        raise ShapeError("vstack of nothing")
    cols = parts[0].cols
    for p in parts:
        if p.cols != cols:
            raise ShapeError(f"vstack: column mismatch {p.shape} vs (*, {cols})")
    bounds = np.cumsum([0] + [p.rows for p in parts])

    def backward(g):
        return tuple(g[bounds[i]:bounds[i + 1]] for i in range(len(parts)))

    return record("vstack", np.vstack([p.values for p in parts]), tuple(parts), backward)
