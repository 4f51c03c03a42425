"""
Deterministic generation of planted-partition task suites.

For every planted group g an orthonormal basis B_g (d x r) is drawn so that
bases of different groups are mutually orthogonal. Task i of group g has
the noiseless signal f_i(x) = w_i . tanh(a B_g^T x), where w_i scatters around
a direction shared by the whole group and the gain a sharpens the features
so that a narrow branch cannot fit two groups at once. Regression targets add Gaussian
noise; classification targets threshold the noisy signal at its median.
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from dmtg.errors import SubspaceCapacityError
from dmtg.tasksuite.planted_spec import PlantedSpec, TaskKind
from logger import AppLogger

logger = AppLogger().get_logger("tasksuite")

SPLITS = ("train", "val", "test")

# Gauss-Hermite nodes for expectations over a standard normal latent
QUADRATURE_POINTS = 64


@dataclass
class TaskSuite:
    spec: PlantedSpec
    bases: List[np.ndarray]
    weights: np.ndarray
    x: Dict[str, np.ndarray] = field(default_factory=dict)
    y: Dict[str, np.ndarray] = field(default_factory=dict)
    signal: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_tasks(self) -> int:
        return self.spec.n_tasks

    @property
    def input_dim(self) -> int:
        return self.spec.input_dim

    @property
    def binary_columns(self) -> List[bool]:
        return self.spec.binary_columns

    def targets(self, split: str, task: int) -> np.ndarray:
        """Targets of one task as a samples x 1 column."""
        return self.y[split][:, task:task + 1]

    def n_samples(self, split: str) -> int:
        return self.x[split].shape[0]

    def subset(self, tasks) -> "TaskSuite":
        """The same inputs with only the given task columns (in the given order)."""
        tasks = list(tasks)
        spec = self.spec.model_copy(update={
            "n_tasks": len(tasks),
            "true_partition": [self.spec.true_partition[t] for t in tasks],
            "kinds": [self.spec.task_kinds[t] for t in tasks],
        })
        return TaskSuite(
            spec=spec,
            bases=self.bases,
            weights=self.weights[tasks],
            x=self.x,
            y={s: self.y[s][:, tasks] for s in self.y},
            signal={s: self.signal[s][:, tasks] for s in self.signal},
        )


def draw_bases(rng: np.random.Generator, input_dim: int, rank: int, n_groups: int) -> List[np.ndarray]:
    if rank * n_groups > input_dim:
        raise SubspaceCapacityError(
            f"{n_groups} groups x {rank} latent dims = {rank * n_groups} exceeds input_dim {input_dim}"
        )
    q, _ = np.linalg.qr(rng.standard_normal((input_dim, rank * n_groups)))
    return [q[:, g * rank:(g + 1) * rank].copy() for g in range(n_groups)]


def signal_scale(gain: float) -> float:
    """Weight norm that gives every noiseless signal unit variance at this gain."""
    nodes, quad_weights = np.polynomial.hermite_e.hermegauss(QUADRATURE_POINTS)
    second_moment = float(np.sum(quad_weights * np.tanh(gain * nodes) ** 2) / np.sqrt(2.0 * np.pi))
    return 1.0 / np.sqrt(second_moment)


def noiseless_signals(x: np.ndarray, bases: List[np.ndarray], weights: np.ndarray,
                      groups: List[int], gain: float = 1.0) -> np.ndarray:
    latent = [np.tanh(gain * (x @ basis)) for basis in bases]
    return np.column_stack([latent[g] @ weights[i] for i, g in enumerate(groups)])


def generate(spec: PlantedSpec) -> TaskSuite:
    """Build the suite; identical specs give byte-identical arrays."""
    rng = np.random.default_rng(spec.seed)
    groups = list(spec.partition.assignment)
    rank = spec.latent_dim_per_group

    bases = draw_bases(rng, spec.input_dim, rank, spec.n_groups)

    group_directions = rng.standard_normal((spec.n_groups, rank))
    weights = np.empty((spec.n_tasks, rank))
    scale = signal_scale(spec.signal_gain)
    for i, g in enumerate(groups):
        w = group_directions[g] + spec.task_jitter * rng.standard_normal(rank)
        weights[i] = scale * w / np.linalg.norm(w)

    binary = np.array(spec.binary_columns)
    suite = TaskSuite(spec=spec, bases=bases, weights=weights)
    for split in SPLITS:
        n = getattr(spec.samples, split)
        x = rng.standard_normal((n, spec.input_dim))
        signal = noiseless_signals(x, bases, weights, groups, spec.signal_gain)
        noisy = signal + spec.noise_std * rng.standard_normal(signal.shape)
        if binary.any():
            above = (noisy > np.median(noisy, axis=0, keepdims=True)).astype(np.float64)
            noisy = np.where(binary, above, noisy)
        suite.x[split] = x
        suite.signal[split] = signal
        suite.y[split] = noisy

    kinds = {kind.value: spec.task_kinds.count(kind) for kind in TaskKind}
    logger.debug(
        f"Generated suite: N={spec.n_tasks}, groups={spec.n_groups}, d={spec.input_dim}, r={rank}, "
        f"gain={spec.signal_gain}, sigma={spec.noise_std}, kinds={kinds}, seed={spec.seed}"
    )
    return suite
