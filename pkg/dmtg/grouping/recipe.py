from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dmtg.autodiff import AdamState, PlateauScheduler
from dmtg.grouping.model import GroupModel


@dataclass(frozen=True)
class TrainingRecipe:
    """Architecture and optimizer settings shared by every method of a run."""

    width: int = 3
    depth: int = 2
    shared_layers: int = 0
    batch_size: int = 64
    lr: float = 3e-3
    assignment_lr: float = 3e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    plateau_patience: int = 5
    plateau_factor: float = 0.5
    min_lr: float = 0.0

    def new_adam(self) -> AdamState:
        return AdamState(lr=self.lr, beta1=self.beta1, beta2=self.beta2, eps=self.eps)

    def new_plateau(self) -> PlateauScheduler:
        return PlateauScheduler(factor=self.plateau_factor, patience=self.plateau_patience, min_lr=self.min_lr)

    def build(self, input_dim: int, n_tasks: int, branch_tasks: Sequence[Sequence[int]],
              rng: np.random.Generator) -> GroupModel:
        return GroupModel.build(input_dim, n_tasks, self.width, self.depth, self.shared_layers, branch_tasks, rng)
