"""
Set partitions of N tasks into at most K non-empty groups.

Partitions are produced as restricted growth strings: task 0 is in group 0,
and each later task joins an existing group or opens the next one. That is
exactly the canonical (first-occurrence) labelling, so every partition is
emitted once, in lexicographic order of its labels.
"""

import itertools
from functools import lru_cache
from typing import Iterator, List

from dmtg.errors import DomainError, EnumerationLimitError
from dmtg.partition import Partition, canonical_labels

MAX_ENUMERATION_TASKS = 12


def _check_bounds(n_tasks: int, k_groups: int) -> None:
    if n_tasks < 1 or k_groups < 1:
        raise DomainError(f"need N >= 1 and K >= 1, got N={n_tasks}, K={k_groups}")
    if n_tasks > MAX_ENUMERATION_TASKS:
        raise EnumerationLimitError(
            f"enumerating partitions of {n_tasks} tasks exceeds the limit of {MAX_ENUMERATION_TASKS}"
        )


def _growth_strings(n_tasks: int, k_groups: int) -> Iterator[tuple]:
    labels = [0] * n_tasks

    def extend(position: int, used: int):
        if position == n_tasks:
            yield tuple(labels)
            return
        for label in range(min(used + 1, k_groups)):
            labels[position] = label
            yield from extend(position + 1, max(used, label + 1))

    yield from extend(1, 1)


def iter_partitions(n_tasks: int, k_groups: int) -> Iterator[Partition]:
    _check_bounds(n_tasks, k_groups)
    for labels in _growth_strings(n_tasks, k_groups):
        yield Partition(labels)


def enumerate_partitions(n_tasks: int, k_groups: int) -> List[Partition]:
    """All partitions into at most K non-empty groups, canonical and in lexicographic order."""
    return list(iter_partitions(n_tasks, k_groups))


def enumerate_by_assignment(n_tasks: int, k_groups: int) -> List[Partition]:
    """Reference enumerator: all K^N label vectors, canonicalized and deduplicated."""
    seen = set()
    for labels in itertools.product(range(k_groups), repeat=n_tasks):
        seen.add(canonical_labels(labels))
    return [Partition(labels) for labels in sorted(seen)]


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind: partitions of n items into exactly k non-empty blocks."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def count_partitions(n_tasks: int, k_groups: int) -> int:
    """S(N, 1) + ... + S(N, K); the Bell number when K >= N."""
    return sum(stirling2(n_tasks, k) for k in range(1, min(k_groups, n_tasks) + 1))
