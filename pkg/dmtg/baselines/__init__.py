"""
Reference strategies: naive MTL, STL, random grouping, HOA, the brute-force
oracle and two-shot retraining of a found partition.
"""

from .enumeration import (
    MAX_ENUMERATION_TASKS, iter_partitions, enumerate_partitions, enumerate_by_assignment,
    stirling2, count_partitions,
)
from .fixed_partition import (
    INIT_SCRATCH, INIT_NAIVE_MTL, GroupOutcome, PartitionScore, GroupTraining, group_seed,
    train_fixed_partition, train_naive_mtl, train_stl, train_two_shot,
)
from .random_group import random_group, random_group_generator
from .hoa import PairwiseAffinityTable, build_affinity_table, select_partition, hoa_pairwise
from .oracle import OracleResult, brute_force_oracle, run_oracle

__all__ = [
    'MAX_ENUMERATION_TASKS', 'iter_partitions', 'enumerate_partitions', 'enumerate_by_assignment',
    'stirling2', 'count_partitions',
    'INIT_SCRATCH', 'INIT_NAIVE_MTL', 'GroupOutcome', 'PartitionScore', 'GroupTraining', 'group_seed',
    'train_fixed_partition', 'train_naive_mtl', 'train_stl', 'train_two_shot',
    'random_group', 'random_group_generator',
    'PairwiseAffinityTable', 'build_affinity_table', 'select_partition', 'hoa_pairwise',
    'OracleResult', 'brute_force_oracle', 'run_oracle',
]
