import numpy as np

from dmtg.autodiff import Tensor
from dmtg.errors import DomainError, ShapeError
from dmtg.partition import Partition

ASSIGNMENT_NAME = "assignment"


def init_assignment(n_tasks: int, k_groups: int) -> Tensor:
    """
    N x K learnable assignment scores, every entry 1/K.

    The scores are used as logits inside the Gumbel-softmax, so any constant
    start means a uniform Categorical over groups.
    """
    if n_tasks < 1 or k_groups < 1:
        raise DomainError(f"need at least one task and one group, got N={n_tasks}, K={k_groups}")
    return Tensor(np.full((n_tasks, k_groups), 1.0 / k_groups), requires_grad=True, name=ASSIGNMENT_NAME)


def extract_partition(s) -> Partition:
    """Hard readout: each task goes to its highest-scoring group, ties to the lowest index."""
    values = s.values if isinstance(s, Tensor) else np.asarray(s, dtype=np.float64)
    if values.ndim != 2:
        raise ShapeError(f"assignment scores must be N x K, got shape {values.shape}")
    # np.argmax returns the first maximal index
    return Partition(tuple(int(k) for k in np.argmax(values, axis=1)))


def one_hot(partition: Partition, k_groups: int) -> np.ndarray:
    if not partition.is_valid(k_groups):
        raise DomainError(f"partition {partition.assignment} uses labels outside 0..{k_groups - 1}")
    z = np.zeros((partition.n_tasks, k_groups))
    z[np.arange(partition.n_tasks), list(partition.assignment)] = 1.0
    return z


def assignment_probabilities(s: Tensor, tau: float = 1.0) -> np.ndarray:
    """Noise-free Categorical probabilities softmax(S / tau) per task."""
    logits = s.values / tau
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)
