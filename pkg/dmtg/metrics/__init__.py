"""
Normalized gains, loss totals and partition recovery scores.
"""

from .normgain import norm_gain_loss, norm_gain_error, mean_gain, total_loss
from .recovery import PartitionRecovery, partition_recovery
from .report import MetricsReport, build_report

__all__ = [
    'norm_gain_loss', 'norm_gain_error', 'mean_gain', 'total_loss',
    'PartitionRecovery', 'partition_recovery',
    'MetricsReport', 'build_report',
]
