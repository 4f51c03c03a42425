"""
Normalized gain over the naive fully shared MTL baseline.

Per task n: 100 * (B_n - M_n) / B_n, where B_n is the naive-MTL loss (or
error) and M_n the method's. The reported figure is the mean over tasks,
so tasks with large loss magnitudes do not dominate.
"""

from typing import Sequence, Tuple

import numpy as np

from dmtg.errors import DomainError, ShapeError


def _normalized_gain(method: Sequence[float], baseline: Sequence[float], what: str) -> Tuple[np.ndarray, float]:
    method = np.asarray(method, dtype=np.float64).ravel()
    baseline = np.asarray(baseline, dtype=np.float64).ravel()
    if method.shape != baseline.shape:
        raise ShapeError(f"{method.size} method {what}es against {baseline.size} baseline {what}es")
    if method.size == 0:
        raise ShapeError(f"no task {what}es given")
    if not (np.all(np.isfinite(method)) and np.all(np.isfinite(baseline))):
        raise DomainError(f"task {what}es must be finite")
    if np.any(baseline <= 0):
        raise DomainError(f"naive-MTL {what}es must be strictly positive, got {baseline.tolist()}")
    per_task = 100.0 * (baseline - method) / baseline
    return per_task, mean_gain(per_task)


def norm_gain_loss(method_losses: Sequence[float], naive_mtl_losses: Sequence[float]) -> Tuple[np.ndarray, float]:
    """Per-task loss improvement in percent, and its mean."""
    return _normalized_gain(method_losses, naive_mtl_losses, "loss")


def norm_gain_error(method_errors: Sequence[float], naive_mtl_errors: Sequence[float]) -> Tuple[np.ndarray, float]:
    """Per-task improvement of a unified error (e.g. classification error) in percent, and its mean."""
    return _normalized_gain(method_errors, naive_mtl_errors, "error")


def mean_gain(per_task_pct: Sequence[float]) -> float:
    return float(np.mean(np.asarray(per_task_pct, dtype=np.float64)))


def total_loss(per_task_loss: Sequence[float]) -> float:
    """Plain sum of task losses; 0 for no tasks."""
    values = np.asarray(per_task_loss, dtype=np.float64).ravel()
    if not np.all(np.isfinite(values)):
        raise DomainError("task losses must be finite")
    return float(values.sum())
