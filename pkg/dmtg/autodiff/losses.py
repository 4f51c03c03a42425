"""
Task losses: mean squared error for regression, binary cross-entropy on
logits for classification, and a column-wise variant producing one loss
per task column in a single node.
"""

from typing import Sequence

import numpy as np

from dmtg.autodiff.ops import ArrayLike, constant
from dmtg.autodiff.tensor import Tensor, record
from dmtg.errors import ShapeError, DomainError


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softplus_terms(p: np.ndarray, t: np.ndarray) -> np.ndarray:
    # log(1 + e^p) - t*p without overflow
    return np.maximum(p, 0.0) - p * t + np.log1p(np.exp(-np.abs(p)))


def _check_binary(target: np.ndarray) -> None:
    if not np.all((target == 0.0) | (target == 1.0)):
        raise DomainError("BCE targets must be 0 or 1")


def mse(pred: ArrayLike, target: ArrayLike) -> Tensor:
    pred, target = constant(pred), constant(target)
    if pred.shape != target.shape:
        raise ShapeError(f"mse: prediction {pred.shape} vs target {target.shape}")
    diff = pred.values - target.values
    n = diff.size

    def backward(g):
        return 2.0 * g[0, 0] * diff / n, -2.0 * g[0, 0] * diff / n

    return record("mse", np.array([[np.mean(diff * diff)]]), (pred, target), backward)


def bce_with_logits(pred: ArrayLike, target: ArrayLike) -> Tensor:
    pred, target = constant(pred), constant(target)
    if pred.shape != target.shape:
        raise ShapeError(f"bce_with_logits: prediction {pred.shape} vs target {target.shape}")
    p, t = pred.values, target.values
    _check_binary(t)
    n = p.size

    def backward(g):
        return g[0, 0] * (_sigmoid(p) - t) / n, None

    return record("bce_with_logits", np.array([[np.mean(_softplus_terms(p, t))]]), (pred, target), backward)


def task_losses(pred: ArrayLike, target: ArrayLike, binary_columns: Sequence[bool]) -> Tensor:
    """
    Per-column mean loss of a batch of predictions.

    Args:
        pred: B x N head outputs, one column per task.
        target: B x N targets.
        binary_columns: N flags; True selects BCE-with-logits, False selects MSE.

    Returns:
        1 x N tensor of task losses.
    """
    pred, target = constant(pred), constant(target)
    if pred.shape != target.shape:
        raise ShapeError(f"task_losses: prediction {pred.shape} vs target {target.shape}")
    binary = np.asarray(binary_columns, dtype=bool).reshape(1, -1)
    if binary.shape[1] != pred.cols:
        raise ShapeError(f"task_losses: {binary.shape[1]} kind flags for {pred.cols} columns")
    p, t = pred.values, target.values
    rows = p.shape[0]
    if rows == 0:
        raise ShapeError("task_losses of an empty batch")
    if binary.any():
        _check_binary(t[:, binary[0]])

    diff = p - t
    elementwise = np.where(binary, _softplus_terms(p, t), diff * diff)
    losses = elementwise.mean(axis=0, keepdims=True)

    def backward(g):
        local = np.where(binary, _sigmoid(p) - t, 2.0 * diff) / rows
        return local * g, None

    return record("task_losses", losses, (pred, target), backward)
