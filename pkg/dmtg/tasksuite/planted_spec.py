"""
Description of a synthetic task suite with a planted task partition.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dmtg.partition import Partition, canonical_labels


class TaskKind(str, Enum):
    REGRESSION = "regression"
    BINARY_CLASSIFICATION = "binary_classification"


class SampleCounts(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train: int = Field(2000, ge=1)
    val: int = Field(500, ge=1)
    test: int = Field(500, ge=1)


class PlantedSpec(BaseModel):
    """
    Tasks in one planted group read the same latent subspace of the input;
    different groups read mutually orthogonal subspaces.
    """

    model_config = ConfigDict(extra="forbid")

    n_tasks: int = Field(6, ge=1)
    true_partition: List[int] = Field(default_factory=lambda: [0, 0, 1, 1, 2, 2])
    input_dim: int = Field(16, ge=1)
    latent_dim_per_group: int = Field(3, ge=1)
    noise_std: float = Field(0.1, ge=0.0)
    # spread of a task's weights around its group's shared direction
    task_jitter: float = Field(0.3, ge=0.0)
    # slope of the tanh features; large gains make them nearly sign functions
    signal_gain: float = Field(3.0, gt=0.0)
    samples: SampleCounts = Field(default_factory=SampleCounts)
    kinds: Optional[List[TaskKind]] = None
    seed: int = Field(0, ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.true_partition) != self.n_tasks:
            raise ValueError(f"true_partition has {len(self.true_partition)} entries for {self.n_tasks} tasks")
        if any(label < 0 for label in self.true_partition):
            raise ValueError("true_partition labels must be non-negative")
        if self.kinds is not None and len(self.kinds) != self.n_tasks:
            raise ValueError(f"kinds has {len(self.kinds)} entries for {self.n_tasks} tasks")
        return self

    @property
    def partition(self) -> Partition:
        return Partition(canonical_labels(self.true_partition))

    @property
    def n_groups(self) -> int:
        return self.partition.n_groups

    @property
    def task_kinds(self) -> List[TaskKind]:
        return list(self.kinds) if self.kinds is not None else [TaskKind.REGRESSION] * self.n_tasks

    @property
    def binary_columns(self) -> List[bool]:
        return [kind == TaskKind.BINARY_CLASSIFICATION for kind in self.task_kinds]

    def with_seed(self, seed: int) -> "PlantedSpec":
        return self.model_copy(update={"seed": seed})
