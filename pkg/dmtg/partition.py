"""
Hard assignment of N tasks to at most K groups.

Re-exported from dmtg.grouping; kept in its own module so the task suite
can depend on it without importing the training code.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from dmtg.errors import ShapeError, DomainError


def canonical_labels(assignment: Sequence[int]) -> Tuple[int, ...]:
    """Relabel groups by order of first occurrence: (2, 2, 0, 1) -> (0, 0, 1, 2)."""
    mapping: Dict[int, int] = {}
    out = []
    for label in assignment:
        if label not in mapping:
            mapping[label] = len(mapping)
        out.append(mapping[label])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    assignment: Tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(a) for a in self.assignment)
        if any(a < 0 for a in labels):
            raise DomainError(f"group labels must be non-negative, got {labels}")
        object.__setattr__(self, "assignment", labels)

    # ------------------------- Constructors -------------------------
    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]], n_tasks: int) -> "Partition":
        assignment = [-1] * n_tasks
        for label, members in enumerate(groups):
            for task in members:
                if assignment[task] != -1:
                    raise DomainError(f"task {task} appears in more than one group")
                assignment[task] = label
        if -1 in assignment:
            raise DomainError(f"task {assignment.index(-1)} is not in any group")
        return cls(tuple(assignment))

    @classmethod
    def from_string(cls, text: str) -> "Partition":
        return cls(tuple(int(part) for part in text.split("|")))

    @classmethod
    def all_in_one(cls, n_tasks: int) -> "Partition":
        return cls((0,) * n_tasks)

    @classmethod
    def singletons(cls, n_tasks: int) -> "Partition":
        return cls(tuple(range(n_tasks)))

    # ------------------------- Views -------------------------
    @property
    def n_tasks(self) -> int:
        return len(self.assignment)

    @property
    def n_groups(self) -> int:
        """Number of non-empty groups."""
        return len(set(self.assignment))

    def canonical(self) -> "Partition":
        return Partition(canonical_labels(self.assignment))

    def groups(self) -> List[Tuple[int, ...]]:
        """Non-empty groups as sorted task tuples, in canonical group order."""
        members: Dict[int, List[int]] = {}
        for task, label in enumerate(canonical_labels(self.assignment)):
            members.setdefault(label, []).append(task)
        return [tuple(members[label]) for label in sorted(members)]

    def group_sizes(self, k_groups: int) -> List[int]:
        """|G_k| for k in 0..K-1 under the raw labels; empty groups count 0."""
        sizes = [0] * k_groups
        for label in self.assignment:
            sizes[label] += 1
        return sizes

    def is_valid(self, k_groups: int) -> bool:
        return all(0 <= a < k_groups for a in self.assignment)

    def same_grouping(self, other: "Partition") -> bool:
        if self.n_tasks != other.n_tasks:
            raise ShapeError(f"partitions over {self.n_tasks} and {other.n_tasks} tasks")
        return canonical_labels(self.assignment) == canonical_labels(other.assignment)

    def to_string(self) -> str:
        return "|".join(str(a) for a in canonical_labels(self.assignment))

    def describe(self) -> str:
        return " ".join("{" + ",".join(str(t) for t in g) + "}" for g in self.groups())

    def __str__(self):
        return self.to_string()
