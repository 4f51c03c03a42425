# file: dmtg/baselines/hoa.py

"""
Higher-order approximation (HOA) from pairwise trainings.

Every task is trained alone and with every other task. The loss of task i
inside a larger group is approximated by the mean of its pair losses with
the other members; the partition with the best approximated mean NormGain
over naive MTL is selected from the full enumeration.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dmtg.baselines.enumeration import iter_partitions
from dmtg.baselines.fixed_partition import GroupTraining, train_naive_mtl
from dmtg.errors import DomainError
from dmtg.grouping import TrainingRecipe
from dmtg.metrics import norm_gain_loss
from dmtg.partition import Partition
from dmtg.tasksuite import TaskSuite
from logger import AppLogger

logger = AppLogger().get_logger("hoa")


@dataclass
class PairwiseAffinityTable:
    singleton_loss: List[float]
    # pair_loss[(i, j)]: validation loss of task i when trained together with task j
    pair_loss: Dict[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def n_tasks(self) -> int:
        return len(self.singleton_loss)

    def set_pair(self, i: int, j: int, loss_i: float, loss_j: float) -> None:
        if i == j:
            raise DomainError("a pair needs two distinct tasks")
        self.pair_loss[(i, j)] = float(loss_i)
        self.pair_loss[(j, i)] = float(loss_j)

    def approximate_loss(self, task: int, group: Sequence[int]) -> float:
        others = [j for j in group if j != task]
        if not others:
            return self.singleton_loss[task]
        return float(np.mean([self.pair_loss[(task, j)] for j in others]))

    def approximate_partition(self, partition: Partition) -> List[float]:
        losses = [0.0] * partition.n_tasks
        for group in partition.groups():
            for task in group:
                losses[task] = self.approximate_loss(task, group)
        return losses


def build_affinity_table(training: GroupTraining, epochs: int) -> PairwiseAffinityTable:
    n = training.suite.n_tasks
    table = PairwiseAffinityTable(
        singleton_loss=[training.train_group((i,), epochs).val_loss[0] for i in range(n)]
    )
    for i, j in itertools.combinations(range(n), 2):
        outcome = training.train_group((i, j), epochs)
        table.set_pair(i, j, outcome.val_loss[0], outcome.val_loss[1])
    logger.info(f"Affinity table built from {n} singletons and {len(table.pair_loss) // 2} pairs")
    return table


def select_partition(table: PairwiseAffinityTable, k_groups: int,
                     naive_mtl_loss: Sequence[float]) -> Tuple[Partition, float]:
    """Enumerated partition with the highest approximated mean NormGain; first one wins ties."""
    best, best_gain = None, -np.inf
    for partition in iter_partitions(table.n_tasks, k_groups):
        _, gain = norm_gain_loss(table.approximate_partition(partition), naive_mtl_loss)
        if gain > best_gain:
            best, best_gain = partition, gain
    return best, best_gain


def hoa_pairwise(suite: TaskSuite, k_groups: int, epochs: int, recipe: Optional[TrainingRecipe] = None,
                 seed: int = 0, training: Optional[GroupTraining] = None,
                 naive_mtl_loss: Optional[Sequence[float]] = None) -> Partition:
    if suite.n_tasks < 2:
        raise DomainError("HOA needs at least two tasks")
    training = training or GroupTraining(suite, recipe or TrainingRecipe(), seed)
    if naive_mtl_loss is None:
        naive_mtl_loss = train_naive_mtl(suite, epochs, training=training).per_task_val_loss
    table = build_affinity_table(training, epochs)
    partition, gain = select_partition(table, k_groups, naive_mtl_loss)
    logger.info(f"HOA picked {partition.describe()} (approximated NormGain {gain:+.2f}%)")
    return partition
