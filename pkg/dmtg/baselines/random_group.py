import numpy as np

from dmtg.errors import DomainError
from dmtg.partition import Partition

# spawn key of the random-grouping stream of a run seed
RANDOM_GROUP_STREAM = 2


def random_group(n_tasks: int, k_groups: int, rng: np.random.Generator) -> Partition:
    """Each task independently and uniformly assigned to one of K groups."""
    if k_groups < 1:
        raise DomainError(f"K must be at least 1, got {k_groups}")
    return Partition(tuple(int(k) for k in rng.integers(0, k_groups, size=n_tasks)))


def random_group_generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(RANDOM_GROUP_STREAM,)))
