"""
Synthetic multi-task suites with a planted ground-truth task partition.
"""

from .planted_spec import TaskKind, SampleCounts, PlantedSpec
from .suite import TaskSuite, generate, signal_scale, SPLITS
from .loaders import Batch, split_loaders, full_split, batch_order
from .suite_io import save_suite, load_suite

__all__ = [
    'TaskKind', 'SampleCounts', 'PlantedSpec',
    'TaskSuite', 'generate', 'signal_scale', 'SPLITS',
    'Batch', 'split_loaders', 'full_split', 'batch_order',
    'save_suite', 'load_suite',
]
