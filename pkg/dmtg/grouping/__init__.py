"""
One-shot differentiable task grouping: assignment scores, Gumbel-softmax
relaxation, the K-branch model, masked-loss training and readout.
"""

from dmtg.partition import Partition, canonical_labels
from .relaxation import (
    gumbel_from_uniform, sample_gumbel, gumbel_softmax, TemperatureSchedule, TEMPERATURE_PRESETS,
)
from .assignment import ASSIGNMENT_NAME, init_assignment, extract_partition, one_hot, assignment_probabilities
from .model import DenseLayer, Branch, GroupModel
from .complexity import Complexity, count_complexity, dense_flops
from .recipe import TrainingRecipe
from .trainer import (
    EpochRecord, TrainingHistory, EpochTrainer, GroupTrainer, OneShotTrainer,
    branch_task_losses, forward_loss_matrix, masked_loss, evaluate_group, hard_readout_losses,
    gumbel_generator, train_one_shot,
)
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint

__all__ = [
    'Partition', 'canonical_labels',
    'gumbel_from_uniform', 'sample_gumbel', 'gumbel_softmax', 'TemperatureSchedule', 'TEMPERATURE_PRESETS',
    'ASSIGNMENT_NAME', 'init_assignment', 'extract_partition', 'one_hot', 'assignment_probabilities',
    'DenseLayer', 'Branch', 'GroupModel',
    'Complexity', 'count_complexity', 'dense_flops', 'TrainingRecipe',
    'EpochRecord', 'TrainingHistory', 'EpochTrainer', 'GroupTrainer', 'OneShotTrainer',
    'branch_task_losses', 'forward_loss_matrix', 'masked_loss', 'evaluate_group', 'hard_readout_losses',
    'gumbel_generator', 'train_one_shot',
    'Checkpoint', 'save_checkpoint', 'load_checkpoint',
]
