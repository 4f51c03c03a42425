from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from dmtg.metrics.normgain import norm_gain_loss, total_loss
from dmtg.metrics.recovery import PartitionRecovery, partition_recovery
from dmtg.partition import Partition


@dataclass(frozen=True)
class MetricsReport:
    per_task_loss: Tuple[float, ...]
    per_task_gain_pct: Tuple[float, ...]
    mean_norm_gain_pct: float
    total_loss: float
    partition: Partition
    partition_recovery: Optional[PartitionRecovery] = None

    def to_dict(self) -> dict:
        recovery = self.partition_recovery
        return {
            "per_task_loss": list(self.per_task_loss),
            "per_task_gain_pct": list(self.per_task_gain_pct),
            "mean_norm_gain_pct": self.mean_norm_gain_pct,
            "total_loss": self.total_loss,
            "partition": self.partition.to_string(),
            "exact_match": None if recovery is None else recovery.exact_match,
            "rand_index": None if recovery is None else recovery.rand_index,
        }


def build_report(per_task_loss: Sequence[float], naive_mtl_loss: Sequence[float], partition: Partition,
                 planted: Optional[Partition] = None) -> MetricsReport:
    per_task_pct, mean_pct = norm_gain_loss(per_task_loss, naive_mtl_loss)
    return MetricsReport(
        per_task_loss=tuple(float(v) for v in per_task_loss),
        per_task_gain_pct=tuple(float(v) for v in per_task_pct),
        mean_norm_gain_pct=mean_pct,
        total_loss=total_loss(per_task_loss),
        partition=partition,
        partition_recovery=None if planted is None else partition_recovery(partition, planted),
    )
