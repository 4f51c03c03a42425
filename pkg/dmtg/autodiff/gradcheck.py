"""
Central finite-difference oracle for checking analytic gradients.
"""

from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from dmtg.autodiff.tensor import Tensor, backward, no_grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / scale


def numerical_gradient(loss_fn: Callable[[], Tensor], param: Tensor, h: float = 1e-5,
                       indices: Optional[Iterable[Tuple[int, int]]] = None) -> np.ndarray:
    """
    Estimate d loss / d param by central differences.

    Args:
        loss_fn: rebuilds the scalar loss from current parameter values; must be deterministic.
        param: tensor whose entries are perturbed in place and restored.
        h: step size.
        indices: entries to check; all entries when omitted (others stay zero).

    Returns:
        Array shaped like param.
    """
    estimate = np.zeros_like(param.values)
    if indices is None:
        indices = [tuple(ix) for ix in np.ndindex(*param.shape)]
    with no_grad():
        for ix in indices:
            original = param.values[ix]
            param.values[ix] = original + h
            plus = loss_fn().item()
            param.values[ix] = original - h
            minus = loss_fn().item()
            param.values[ix] = original
            estimate[ix] = (plus - minus) / (2.0 * h)
    return estimate


def analytic_gradients(loss_fn: Callable[[], Tensor], params: Sequence[Tensor]) -> List[np.ndarray]:
    for p in params:
        p.zero_grad()
    backward(loss_fn())
    grads = [p.grad.copy() for p in params]
    for p in params:
        p.zero_grad()
    return grads


def max_gradient_error(loss_fn: Callable[[], Tensor], params: Sequence[Tensor], h: float = 1e-5,
                       samples_per_param: Optional[int] = None,
                       rng: Optional[np.random.Generator] = None) -> float:
    """Largest relative error between backward() and finite differences over the checked entries."""
    grads = analytic_gradients(loss_fn, params)
    worst = 0.0
    for param, grad in zip(params, grads):
        all_indices = [tuple(ix) for ix in np.ndindex(*param.shape)]
        if samples_per_param is not None and samples_per_param < len(all_indices):
            rng = rng or np.random.default_rng(0)
            picks = rng.choice(len(all_indices), size=samples_per_param, replace=False)
            indices = [all_indices[i] for i in sorted(picks)]
        else:
            indices = all_indices
        numeric = numerical_gradient(loss_fn, param, h=h, indices=indices)
        rows, cols = zip(*indices)
        errors = relative_error(grad[rows, cols], numeric[rows, cols])
        worst = max(worst, float(errors.max()))
    return worst
