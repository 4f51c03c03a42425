"""
DMTG - differentiable multi-task grouping.

This package learns which of N tasks should share which of K encoders by
pruning K*N task heads down to N through a relaxed Categorical assignment,
while training the grouped encoders in the same optimization run.
"""

__version__ = "1.0.0"
