"""
Minimal reverse-mode automatic differentiation over dense rank-2 tensors.
"""

from .tensor import Tensor, ComputationRecord, backward, no_grad, is_grad_enabled
from .ops import (
    constant, matmul, transpose, elementwise, add, sub, mul, unary, relu, tanh, exp, log,
    neg, scale, row_softmax, reduce, sum_all, mean, row_mean, replicate_rows, column, vstack,
)
from .losses import mse, bce_with_logits, task_losses
from .optim import AdamState, PlateauScheduler, adam_step, parameter_key
from .gradcheck import relative_error, numerical_gradient, analytic_gradients, max_gradient_error

__all__ = [
    'Tensor', 'ComputationRecord', 'backward', 'no_grad', 'is_grad_enabled',
    'constant', 'matmul', 'transpose', 'elementwise', 'add', 'sub', 'mul', 'unary',
    'relu', 'tanh', 'exp', 'log', 'neg', 'scale', 'row_softmax', 'reduce', 'sum_all',
    'mean', 'row_mean', 'replicate_rows', 'column', 'vstack',
    'mse', 'bce_with_logits', 'task_losses',
    'AdamState', 'PlateauScheduler', 'adam_step', 'parameter_key',
    'relative_error', 'numerical_gradient', 'analytic_gradients', 'max_gradient_error',
]
