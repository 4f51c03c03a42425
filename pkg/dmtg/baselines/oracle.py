from dataclasses import dataclass
from typing import List, Optional, Tuple

from tqdm import tqdm

from dmtg.baselines.enumeration import enumerate_partitions
from dmtg.baselines.fixed_partition import GroupTraining, PartitionScore
from dmtg.grouping import TrainingRecipe
from dmtg.metrics import total_loss
from dmtg.partition import Partition
from dmtg.tasksuite import TaskSuite
from logger import AppLogger

logger = AppLogger().get_logger("oracle")


@dataclass
class OracleResult:
    best: PartitionScore
    scores: List[PartitionScore]

    def score_of(self, partition: Partition) -> Optional[PartitionScore]:
        for score in self.scores:
            if score.partition.same_grouping(partition):
                return score
        return None

    def rank_of(self, partition: Partition) -> Optional[int]:
        """1-based rank by aggregate among all enumerated partitions."""
        target = self.score_of(partition)
        if target is None:
            return None
        return 1 + sum(1 for s in self.scores if s.aggregate > target.aggregate)

    def table_rows(self) -> List[dict]:
        rows = []
        for score in self.scores:
            row = {
                "partition": score.partition.to_string(),
                "groups": score.partition.describe(),
                "total_loss": total_loss(score.per_task_val_loss),
                "mean_normgain_pct": score.aggregate,
            }
            for task, loss in enumerate(score.per_task_val_loss):
                row[f"val_loss_t{task}"] = loss
            rows.append(row)
        return rows


def brute_force_oracle(suite: TaskSuite, k_groups: int, epochs: int, recipe: Optional[TrainingRecipe] = None,
                       seed: int = 0, training: Optional[GroupTraining] = None,
                       show_progress: bool = False) -> Tuple[PartitionScore, List[PartitionScore]]:
    """
    Train every partition into at most K groups with the same budget and
    rank them by mean validation NormGain over the all-in-one partition.

    Returns:
        (best, all scores in enumeration order).
    """
    result = run_oracle(suite, k_groups, epochs, recipe, seed, training, show_progress)
    return result.best, result.scores


def run_oracle(suite: TaskSuite, k_groups: int, epochs: int, recipe: Optional[TrainingRecipe] = None,
               seed: int = 0, training: Optional[GroupTraining] = None,
               show_progress: bool = False) -> OracleResult:
    training = training or GroupTraining(suite, recipe or TrainingRecipe(), seed)
    partitions = enumerate_partitions(suite.n_tasks, k_groups)
    logger.info(f"Oracle: training {len(partitions)} partitions of {suite.n_tasks} tasks into <= {k_groups} groups")

    raw = [training.train_partition(p, epochs)
           for p in tqdm(partitions, desc="oracle", disable=not show_progress, leave=False)]
    # the all-in-one partition is always enumerated first
    naive = raw[0].per_task_val_loss
    scores = [score.scored_against(naive) for score in raw]

    best = scores[0]
    for score in scores[1:]:
        if score.aggregate > best.aggregate:
            best = score
    assert all(best.aggregate >= s.aggregate for s in scores)
    logger.info(f"Oracle best: {best.partition.describe()} ({best.aggregate:+.2f}%)")
    return OracleResult(best=best, scores=scores)
