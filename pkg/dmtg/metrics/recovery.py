from dataclasses import dataclass

from sklearn.metrics import rand_score

from dmtg.errors import ShapeError
from dmtg.partition import Partition


@dataclass(frozen=True)
class PartitionRecovery:
    exact_match: bool
    rand_index: float


def partition_recovery(found: Partition, planted: Partition) -> PartitionRecovery:
    """
    Agreement of a found partition with the planted one, ignoring group labels.

    The Rand index is the share of task pairs that both partitions put in the
    same group or both put in different groups; 1.0 for a single task.
    """
    if found.n_tasks != planted.n_tasks:
        raise ShapeError(f"partitions over {found.n_tasks} and {planted.n_tasks} tasks")
    exact = found.same_grouping(planted)
    if found.n_tasks < 2:
        return PartitionRecovery(exact_match=exact, rand_index=1.0)
    return PartitionRecovery(
        exact_match=exact,
        rand_index=float(rand_score(list(planted.assignment), list(found.assignment))),
    )
