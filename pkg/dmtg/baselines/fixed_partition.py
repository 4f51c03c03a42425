# file: dmtg/baselines/fixed_partition.py

"""
Training a fixed task partition: one encoder per non-empty group, heads only
for the group's tasks. Groups are trained independently, each with a seed
derived from the run seed and its member tasks, so the same group yields
the same result inside any partition and is trained only once per run.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from config.project_config import BaseConfigurable
from dmtg.errors import DomainError
from dmtg.grouping import GroupModel, GroupTrainer, TrainingHistory, TrainingRecipe, evaluate_group
from dmtg.metrics import norm_gain_loss
from dmtg.partition import Partition
from dmtg.tasksuite import TaskSuite

INIT_SCRATCH = "scratch"
INIT_NAIVE_MTL = "naive_mtl"


def group_seed(seed: int, tasks: Sequence[int]) -> int:
    """Seed of one group's training, a pure function of the run seed and the member tasks."""
    state = np.random.SeedSequence([seed, len(tasks), *tasks]).generate_state(1, np.uint64)
    return int(state[0])


@dataclass
class GroupOutcome:
    tasks: Tuple[int, ...]
    val_loss: Tuple[float, ...]
    test_loss: Tuple[float, ...]
    model: GroupModel
    history: TrainingHistory = field(default_factory=TrainingHistory)


@dataclass(frozen=True)
class PartitionScore:
    partition: Partition
    per_task_val_loss: Tuple[float, ...]
    per_task_test_loss: Tuple[float, ...]
    aggregate: Optional[float] = None

    def scored_against(self, naive_mtl_val_loss: Sequence[float]) -> "PartitionScore":
        """Copy with aggregate = mean validation NormGain against naive MTL."""
        _, mean_pct = norm_gain_loss(self.per_task_val_loss, naive_mtl_val_loss)
        return replace(self, aggregate=mean_pct)


class GroupTraining(BaseConfigurable):
    """Trains and caches per-group encoders for one suite, recipe and run seed."""

    def __init__(self, suite: TaskSuite, recipe: TrainingRecipe, seed: int):
        super().__init__()
        self.suite = suite
        self.recipe = recipe
        self.seed = seed
        self._init_models: Dict[str, GroupModel] = {}
        self._cache: Dict[tuple, GroupOutcome] = {}

    def register_init(self, name: str, model: GroupModel) -> None:
        """Make a trained single-encoder model over all tasks available as a starting point."""
        if model.k_branches != 1 or model.branches[0].tasks != tuple(range(self.suite.n_tasks)):
            raise DomainError("an initial model must be one encoder with heads for every task")
        self._init_models[name] = model

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def train_group(self, tasks: Sequence[int], epochs: int, init: str = INIT_SCRATCH) -> GroupOutcome:
        tasks = tuple(sorted(int(t) for t in tasks))
        key = (tasks, epochs, init)
        if key in self._cache:
            return self._cache[key]

        seed = group_seed(self.seed, tasks)
        if init == INIT_SCRATCH:
            model = self.recipe.build(self.suite.input_dim, self.suite.n_tasks, [tasks], np.random.default_rng(seed))
        elif init in self._init_models:
            model = GroupModel.from_encoder(self._init_models[init], [tasks])
        else:
            raise DomainError(f"unknown initialization '{init}'")

        trainer = GroupTrainer(model, self.suite, self.recipe.batch_size, seed, self.recipe.new_plateau())
        history = trainer.fit(epochs, self.recipe.new_adam())
        outcome = GroupOutcome(
            tasks=tasks,
            val_loss=tuple(float(v) for v in evaluate_group(model, self.suite, "val")),
            test_loss=tuple(float(v) for v in evaluate_group(model, self.suite, "test")),
            model=model,
            history=history,
        )
        self.logger.debug(f"Trained group {tasks} ({init}, {epochs} epochs): val={sum(outcome.val_loss):.6g}")
        self._cache[key] = outcome
        return outcome

    def train_partition(self, partition: Partition, epochs: int, init: str = INIT_SCRATCH) -> PartitionScore:
        if partition.n_tasks != self.suite.n_tasks:
            raise DomainError(f"partition over {partition.n_tasks} tasks for a suite of {self.suite.n_tasks}")
        val = [0.0] * partition.n_tasks
        test = [0.0] * partition.n_tasks
        for group in partition.groups():
            outcome = self.train_group(group, epochs, init)
            for j, task in enumerate(outcome.tasks):
                val[task] = outcome.val_loss[j]
                test[task] = outcome.test_loss[j]
        return PartitionScore(partition=partition.canonical(), per_task_val_loss=tuple(val),
                              per_task_test_loss=tuple(test))


def _training(suite: TaskSuite, recipe: Optional[TrainingRecipe], seed: int,
              training: Optional[GroupTraining]) -> GroupTraining:
    if training is not None:
        return training
    return GroupTraining(suite, recipe or TrainingRecipe(), seed)


def train_fixed_partition(partition: Partition, suite: TaskSuite, epochs: int, init: str = INIT_SCRATCH,
                          recipe: Optional[TrainingRecipe] = None, seed: int = 0,
                          naive_model: Optional[GroupModel] = None,
                          training: Optional[GroupTraining] = None) -> PartitionScore:
    """
    Train one encoder per group of a fixed partition.

    Args:
        partition: the grouping to train.
        suite: data.
        epochs: budget of every group.
        init: "scratch", or "naive_mtl" to start every group from naive_model.
        recipe: architecture and optimizer; defaults when omitted.
        seed: run seed.
        naive_model: pretrained naive-MTL model, needed for init="naive_mtl".
        training: shared cache of trained groups; a private one when omitted.

    Returns:
        PartitionScore with per-task validation and test losses (no aggregate yet).
    """
    training = _training(suite, recipe, seed, training)
    if naive_model is not None:
        training.register_init(INIT_NAIVE_MTL, naive_model)
    return training.train_partition(partition, epochs, init)


def train_naive_mtl(suite: TaskSuite, epochs: int, recipe: Optional[TrainingRecipe] = None, seed: int = 0,
                    training: Optional[GroupTraining] = None) -> PartitionScore:
    return train_fixed_partition(Partition.all_in_one(suite.n_tasks), suite, epochs,
                                 recipe=recipe, seed=seed, training=training)


def train_stl(suite: TaskSuite, epochs: int, recipe: Optional[TrainingRecipe] = None, seed: int = 0,
              training: Optional[GroupTraining] = None) -> PartitionScore:
    return train_fixed_partition(Partition.singletons(suite.n_tasks), suite, epochs,
                                 recipe=recipe, seed=seed, training=training)


def train_two_shot(partition: Partition, suite: TaskSuite, scratch_epochs: int, naive_init_epochs: int,
                   naive_model: GroupModel, recipe: Optional[TrainingRecipe] = None, seed: int = 0,
                   training: Optional[GroupTraining] = None) -> Tuple[PartitionScore, PartitionScore]:
    """Retrain a found partition from scratch and from the naive-MTL encoder."""
    training = _training(suite, recipe, seed, training)
    training.register_init(INIT_NAIVE_MTL, naive_model)
    scratch = training.train_partition(partition, scratch_epochs, INIT_SCRATCH)
    naive_init = training.train_partition(partition, naive_init_epochs, INIT_NAIVE_MTL)
    return scratch, naive_init
