"""
Gumbel-softmax relaxation of the per-task Categorical group assignment,
and the temperature schedules that drive it.
"""

from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dmtg.autodiff import Tensor, constant, add, scale, row_softmax
from dmtg.errors import DomainError, ShapeError


def gumbel_from_uniform(u: np.ndarray) -> np.ndarray:
    """g = -log(-log(u)) for u in (0, 1)."""
    u = np.asarray(u, dtype=np.float64)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise DomainError("Gumbel transform needs uniforms strictly inside (0, 1)")
    return -np.log(-np.log(u))


def sample_gumbel(shape: Tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """I.i.d. standard Gumbel noise; deterministic for a given generator state."""
    tiny = np.finfo(np.float64).tiny
    u = rng.uniform(low=tiny, high=1.0, size=shape)
    # uniform() may return exactly `low`; never exactly `high`
    return gumbel_from_uniform(np.clip(u, tiny, np.nextafter(1.0, 0.0)))


def gumbel_softmax(s: Tensor, g: np.ndarray, tau: float) -> Tensor:
    """Relaxed one-hot rows: softmax((S + g) / tau), differentiable in S."""
    if not tau > 0:
        raise DomainError(f"temperature must be positive, got {tau}")
    g = np.asarray(g, dtype=np.float64)
    if g.shape != s.shape:
        raise ShapeError(f"noise shape {g.shape} does not match assignment shape {s.shape}")
    return row_softmax(scale(add(s, constant(g)), 1.0 / tau))


class TemperatureSchedule(BaseModel):
    """
    Fixed temperature, or geometric annealing from tau_start towards tau_end,
    multiplying by decay_factor every epochs_per_decay epochs and clamping at tau_end.
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["fixed", "anneal"] = "fixed"
    tau: float = Field(4.0, gt=0)
    tau_start: float = Field(100.0, gt=0)
    tau_end: float = Field(4.0, gt=0)
    decay_factor: float = Field(0.5, gt=0, le=1)
    epochs_per_decay: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_anneal_range(self):
        if self.kind == "anneal" and self.tau_end > self.tau_start:
            raise ValueError(f"tau_end {self.tau_end} exceeds tau_start {self.tau_start}")
        return self

    @classmethod
    def fixed(cls, tau: float) -> "TemperatureSchedule":
        return cls(kind="fixed", tau=tau)

    @classmethod
    def anneal(cls, tau_start: float, tau_end: float, decay_factor: float,
               epochs_per_decay: int = 1) -> "TemperatureSchedule":
        return cls(kind="anneal", tau_start=tau_start, tau_end=tau_end,
                   decay_factor=decay_factor, epochs_per_decay=epochs_per_decay)

    def value(self, epoch: int) -> float:
        if self.kind == "fixed":
            return self.tau
        decays = epoch // self.epochs_per_decay
        return max(self.tau_end, self.tau_start * self.decay_factor ** decays)

    def describe(self) -> str:
        if self.kind == "fixed":
            return f"fixed tau={self.tau:g}"
        return (f"anneal {self.tau_start:g} -> {self.tau_end:g} x{self.decay_factor:g} "
                f"every {self.epochs_per_decay} epoch(s)")


# Temperature strategies compared in the temperature ablation
TEMPERATURE_PRESETS = {
    "fixed_4": TemperatureSchedule.fixed(4.0),
    "fixed_2.5": TemperatureSchedule.fixed(2.5),
    "anneal_100_4_half": TemperatureSchedule.anneal(100.0, 4.0, 0.5),
    "anneal_100_4_quarter": TemperatureSchedule.anneal(100.0, 4.0, 0.25),
    "anneal_50_4_half": TemperatureSchedule.anneal(50.0, 4.0, 0.5),
    "anneal_10_0.01_half": TemperatureSchedule.anneal(10.0, 0.01, 0.5),
}
