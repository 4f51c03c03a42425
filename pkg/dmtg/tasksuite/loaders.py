from dataclasses import dataclass
from typing import Dict, Iterator

import numpy as np

from dmtg.errors import DomainError, ShapeError
from dmtg.tasksuite.suite import TaskSuite


@dataclass
class Batch:
    x: np.ndarray
    y: np.ndarray
    indices: np.ndarray

    @property
    def size(self) -> int:
        return self.x.shape[0]

    def per_task(self) -> Dict[int, np.ndarray]:
        return {i: self.y[:, i:i + 1] for i in range(self.y.shape[1])}


def batch_order(n_samples: int, seed: int, epoch: int) -> np.ndarray:
    """Sample permutation for one epoch; a pure function of (seed, epoch)."""
    return np.random.default_rng([seed, epoch]).permutation(n_samples)


def split_loaders(suite: TaskSuite, batch: int, seed: int, epoch: int, split: str = "train") -> Iterator[Batch]:
    """Shuffled mini-batches of one split; the last partial batch is kept."""
    if batch < 1:
        raise DomainError(f"batch size must be at least 1, got {batch}")
    x, y = suite.x[split], suite.y[split]
    n = x.shape[0]
    if n == 0:
        raise ShapeError(f"split '{split}' is empty")
    order = batch_order(n, seed, epoch)
    for start in range(0, n, batch):
        idx = order[start:start + batch]
        yield Batch(x=x[idx], y=y[idx], indices=idx)


def full_split(suite: TaskSuite, split: str) -> Batch:
    x = suite.x[split]
    return Batch(x=x, y=suite.y[split], indices=np.arange(x.shape[0]))
