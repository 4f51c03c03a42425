"""
Adam with bias correction, plus the validation-driven plateau decay used
by every trainer.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from dmtg.autodiff.tensor import Tensor
from dmtg.errors import MissingGradientError, ShapeError
from logger import AppLogger

logger = AppLogger().get_logger("optim")


def parameter_key(param: Tensor, index: int) -> str:
    return param.name if param.name else f"param_{index}"


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    # per-parameter multiplier on lr, keyed like the moments
    lr_scale: Dict[str, float] = field(default_factory=dict)

    def state_dict(self) -> dict:
        return {
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
            "step": self.step, "lr_scale": dict(self.lr_scale),
        }

    def moments(self) -> Dict[str, np.ndarray]:
        arrays = {}
        for key in self.m:
            arrays[f"adam_m__{key}"] = self.m[key]
            arrays[f"adam_v__{key}"] = self.v[key]
        return arrays

    @classmethod
    def from_state(cls, state: dict, arrays: Dict[str, np.ndarray]) -> "AdamState":
        adam = cls(lr=state["lr"], beta1=state["beta1"], beta2=state["beta2"], eps=state["eps"],
                   step=state["step"], lr_scale=dict(state.get("lr_scale", {})))
        for name, value in arrays.items():
            if name.startswith("adam_m__"):
                adam.m[name[len("adam_m__"):]] = np.array(value, dtype=np.float64)
            elif name.startswith("adam_v__"):
                adam.v[name[len("adam_v__"):]] = np.array(value, dtype=np.float64)
        return adam


def adam_step(params: Sequence[Tensor], state: AdamState) -> None:
    """Apply one Adam update to every parameter, then zero its gradient."""
    keys = [parameter_key(p, i) for i, p in enumerate(params)]
    if len(set(keys)) != len(keys):
        raise ShapeError("adam_step: parameter names must be unique")
    for key, param in zip(keys, params):
        if not param.requires_grad or param.grad is None:
            raise MissingGradientError(f"parameter '{key}' has no gradient")

    state.step += 1
    t = state.step
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t

    for key, param in zip(keys, params):
        g = param.grad
        if key not in state.m:
            state.m[key] = np.zeros_like(param.values)
            state.v[key] = np.zeros_like(param.values)
        m, v = state.m[key], state.v[key]
        if m.shape != param.values.shape:
            raise ShapeError(f"moment shape {m.shape} does not match parameter '{key}' {param.values.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        lr = state.lr * state.lr_scale.get(key, 1.0)
        param.values -= lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        param.zero_grad()


@dataclass
class PlateauScheduler:
    """Multiply the learning rate by `factor` after `patience` epochs without improvement."""

    factor: float = 0.5
    patience: int = 5
    min_lr: float = 0.0
    best: float = math.inf
    bad_epochs: int = 0

    def step(self, metric: float, state: AdamState) -> bool:
        if metric < self.best:
            self.best = metric
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        if self.bad_epochs < self.patience:
            return False
        self.bad_epochs = 0
        new_lr = max(self.min_lr, state.lr * self.factor)
        if new_lr < state.lr:
            logger.info(f"Validation loss plateaued at {self.best:.6g}; lr {state.lr:.3g} -> {new_lr:.3g}")
            state.lr = new_lr
            return True
        return False

    def state_dict(self) -> dict:
        return {"factor": self.factor, "patience": self.patience, "min_lr": self.min_lr,
                "best": self.best if math.isfinite(self.best) else None, "bad_epochs": self.bad_epochs}

    @classmethod
    def from_state(cls, state: dict) -> "PlateauScheduler":
        best = state.get("best")
        return cls(factor=state["factor"], patience=state["patience"], min_lr=state["min_lr"],
                   best=math.inf if best is None else best, bad_epochs=state["bad_epochs"])
