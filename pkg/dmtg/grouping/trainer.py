# file: dmtg/grouping/trainer.py

"""
Training loops.

EpochTrainer owns the loop every method shares: shuffled mini-batches,
backward, Adam, per-epoch validation and the plateau decay. GroupTrainer
trains one encoder on a fixed set of tasks (naive MTL, STL, every group of
a fixed partition). OneShotTrainer jointly trains the K-branch model and
the assignment scores through the Gumbel-softmax masked loss.
"""

from dataclasses import dataclass, field, asdict
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from config.project_config import BaseConfigurable
from dmtg.autodiff import (
    Tensor, AdamState, PlateauScheduler, adam_step, backward, no_grad,
    constant, mul, sum_all, task_losses, transpose, vstack,
)
from dmtg.errors import NonFiniteError, ShapeError, TrainingDivergedError
from dmtg.grouping.assignment import ASSIGNMENT_NAME, assignment_probabilities, extract_partition
from dmtg.grouping.model import GroupModel
from dmtg.grouping.relaxation import TemperatureSchedule, gumbel_softmax, sample_gumbel
from dmtg.tasksuite import TaskSuite, Batch, split_loaders, full_split

# spawn key of the Gumbel noise stream; batch order uses default_rng([seed, epoch])
GUMBEL_STREAM = 1


# ------------------------- Loss assembly -------------------------
def branch_task_losses(model: GroupModel, x: np.ndarray, y: np.ndarray,
                       binary_columns: Sequence[bool]) -> List[Tensor]:
    """1 x |tasks_k| loss vector of every branch on its own tasks."""
    losses = []
    for branch, pred in zip(model.branches, model.branch_predictions(x)):
        cols = list(branch.tasks)
        losses.append(task_losses(pred, y[:, cols], [binary_columns[t] for t in cols]))
    return losses


def forward_loss_matrix(model: GroupModel, batch: Batch, binary_columns: Sequence[bool]) -> Tensor:
    """
    N x K loss matrix: entry (i, k) is the loss of task i read out from branch k's head.

    Args:
        model: a model whose every branch carries heads for all N tasks.
        batch: inputs and the N target columns.
        binary_columns: per-task loss selector (BCE when True, MSE otherwise).

    Returns:
        Tensor of shape (N, K).
    """
    if not model.is_fully_connected():
        raise ShapeError("the loss matrix needs every branch connected to all task heads")
    if batch.y.shape[1] != model.n_tasks:
        raise ShapeError(f"batch has {batch.y.shape[1]} target columns, model has {model.n_tasks} tasks")
    rows = branch_task_losses(model, batch.x, batch.y, binary_columns)
    return transpose(vstack(rows))


def masked_loss(loss_matrix: Tensor, mask) -> Tensor:
    """Sum over (i, k) of L_ik * z_ik."""
    mask = constant(mask)
    if loss_matrix.shape != mask.shape:
        raise ShapeError(f"loss matrix {loss_matrix.shape} and mask {mask.shape} differ")
    return sum_all(mul(loss_matrix, mask))


# ------------------------- History -------------------------
@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    lr: float
    train_loss: float
    val_task_loss: Tuple[float, ...]
    val_total: float
    tau: Optional[float] = None
    partition: Optional[str] = None
    # value the plateau scheduler saw; val_total unless the trainer monitors another loss
    plateau_value: Optional[float] = None


@dataclass
class TrainingHistory:
    records: List[EpochRecord] = field(default_factory=list)

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    @property
    def last(self) -> EpochRecord:
        return self.records[-1]

    def val_totals(self) -> List[float]:
        return [r.val_total for r in self.records]

    def to_rows(self) -> List[dict]:
        return [asdict(r) for r in self.records]


# ------------------------- Shared loop -------------------------
class EpochTrainer(BaseConfigurable):
    """Mini-batch Adam loop with validation-driven plateau decay; subclasses supply the loss."""

    def __init__(self, suite: TaskSuite, batch_size: int, shuffle_seed: int,
                 plateau: Optional[PlateauScheduler] = None):
        super().__init__()
        self.suite = suite
        self.batch_size = batch_size
        self.shuffle_seed = shuffle_seed
        self.plateau = plateau if plateau is not None else PlateauScheduler()
        self.history = TrainingHistory()

    def parameters(self) -> List[Tensor]:
        raise NotImplementedError

    def batch_loss(self, batch: Batch) -> Tensor:
        raise NotImplementedError

    def validation_losses(self) -> np.ndarray:
        """Per-task validation losses of the tasks this trainer owns."""
        raise NotImplementedError

    def plateau_metric(self, val: np.ndarray) -> float:
        """Validation quantity the plateau decay watches."""
        return float(np.sum(val))

    def begin_epoch(self, epoch: int) -> None:
        pass

    def epoch_extras(self) -> dict:
        return {}

    def diagnostics(self) -> str:
        return ""

    def fit(self, epochs: int, opt: AdamState, start_epoch: int = 0) -> TrainingHistory:
        params = self.parameters()
        show = self.config.get_show_progress()
        epoch = start_epoch
        try:
            for epoch in tqdm(range(start_epoch, start_epoch + epochs), desc=self.__class__.__name__,
                              disable=not show, leave=False):
                self.begin_epoch(epoch)
                running, n_batches = 0.0, 0
                for batch in split_loaders(self.suite, self.batch_size, self.shuffle_seed, epoch):
                    loss = self.batch_loss(batch)
                    running += loss.item()
                    n_batches += 1
                    backward(loss)
                    adam_step(params, opt)

                val = self.validation_losses()
                val_total = float(np.sum(val))
                monitored = self.plateau_metric(val)
                record = EpochRecord(
                    epoch=epoch,
                    lr=opt.lr,
                    train_loss=running / n_batches,
                    val_task_loss=tuple(float(v) for v in val),
                    val_total=val_total,
                    plateau_value=monitored,
                    **self.epoch_extras(),
                )
                self.history.append(record)
                self.logger.debug(
                    f"epoch {epoch}: train={record.train_loss:.6g} val={val_total:.6g} lr={opt.lr:.3g}"
                    + (f" tau={record.tau:g} partition={record.partition}" if record.tau is not None else "")
                )
                self.plateau.step(monitored, opt)
        except NonFiniteError as e:
            message = f"training diverged at epoch {epoch}: {e}; {self.diagnostics()}".rstrip("; ")
            self.logger.error(f"❌ {message}")
            raise TrainingDivergedError(message) from e
        return self.history


class GroupTrainer(EpochTrainer):
    """One encoder shared by a fixed set of tasks; its summed task loss is minimized."""

    def __init__(self, model: GroupModel, suite: TaskSuite, batch_size: int, shuffle_seed: int,
                 plateau: Optional[PlateauScheduler] = None):
        super().__init__(suite, batch_size, shuffle_seed, plateau)
        if model.k_branches != 1:
            raise ShapeError(f"GroupTrainer trains a single encoder, got {model.k_branches} branches")
        self.model = model
        self.tasks = model.branches[0].tasks
        self._val = full_split(suite, "val")

    def parameters(self) -> List[Tensor]:
        return self.model.parameters()

    def batch_loss(self, batch: Batch) -> Tensor:
        (losses,) = branch_task_losses(self.model, batch.x, batch.y, self.suite.binary_columns)
        return sum_all(losses)

    def validation_losses(self) -> np.ndarray:
        return evaluate_group(self.model, self.suite, "val")


def evaluate_group(model: GroupModel, suite: TaskSuite, split: str) -> np.ndarray:
    """Per-task losses of a single-branch model on one split, ordered like its tasks."""
    data = full_split(suite, split)
    with no_grad():
        (losses,) = branch_task_losses(model, data.x, data.y, suite.binary_columns)
    return losses.values[0].copy()


# ------------------------- One-shot grouping -------------------------
def gumbel_generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(GUMBEL_STREAM,)))


def hard_readout_losses(model: GroupModel, assignment: Tensor, suite: TaskSuite, split: str) -> np.ndarray:
    """Per-task loss of each task read from the branch its argmax group selects."""
    data = full_split(suite, split)
    with no_grad():
        matrix = forward_loss_matrix(model, data, suite.binary_columns).values
    partition = extract_partition(assignment)
    return matrix[np.arange(suite.n_tasks), list(partition.assignment)].copy()


class OneShotTrainer(EpochTrainer):
    """
    Joint training of the K-branch model and the N x K assignment scores.

    Every optimizer step draws fresh Gumbel noise, relaxes the assignment
    at the epoch's temperature and minimizes the masked loss over both the
    model weights and the scores.
    """

    def __init__(self, model: GroupModel, assignment: Tensor, suite: TaskSuite,
                 schedule: TemperatureSchedule, batch_size: int, seed: int,
                 plateau: Optional[PlateauScheduler] = None,
                 noise_rng: Optional[np.random.Generator] = None):
        super().__init__(suite, batch_size, seed, plateau)
        if assignment.shape != (suite.n_tasks, model.k_branches):
            raise ShapeError(
                f"assignment {assignment.shape} does not match N={suite.n_tasks}, K={model.k_branches}"
            )
        self.model = model
        self.assignment = assignment
        self.schedule = schedule
        self.noise_rng = noise_rng if noise_rng is not None else gumbel_generator(seed)
        self.tau = schedule.value(0)
        self._val = full_split(suite, "val")
        self._val_matrix: Optional[np.ndarray] = None

    def parameters(self) -> List[Tensor]:
        return self.model.parameters() + [self.assignment]

    def begin_epoch(self, epoch: int) -> None:
        tau = self.schedule.value(epoch)
        if tau != self.tau:
            self.logger.info(f"Temperature {self.tau:g} -> {tau:g} at epoch {epoch}")
        self.tau = tau

    def batch_loss(self, batch: Batch) -> Tensor:
        noise = sample_gumbel(self.assignment.shape, self.noise_rng)
        relaxed = gumbel_softmax(self.assignment, noise, self.tau)
        return masked_loss(forward_loss_matrix(self.model, batch, self.suite.binary_columns), relaxed)

    def validation_losses(self) -> np.ndarray:
        with no_grad():
            self._val_matrix = forward_loss_matrix(self.model, self._val, self.suite.binary_columns).values
        partition = extract_partition(self.assignment)
        return self._val_matrix[np.arange(self.suite.n_tasks), list(partition.assignment)].copy()

    def plateau_metric(self, val: np.ndarray) -> float:
        """Noise-free masked validation loss: each task row weighted by softmax(S / tau)."""
        weights = assignment_probabilities(self.assignment, self.tau)
        return float(np.sum(np.sum(self._val_matrix * weights, axis=1)))

    def epoch_extras(self) -> dict:
        return {"tau": self.tau, "partition": extract_partition(self.assignment).to_string()}

    def diagnostics(self) -> str:
        return f"tau={self.tau:g}, max|S|={float(np.max(np.abs(self.assignment.values))):.6g}"


def train_one_shot(model: GroupModel, assignment: Tensor, suite: TaskSuite, schedule: TemperatureSchedule,
                   opt: AdamState, epochs: int, batch_size: int = 64, seed: int = 0,
                   plateau: Optional[PlateauScheduler] = None,
                   assignment_lr: Optional[float] = None,
                   noise_rng: Optional[np.random.Generator] = None) -> Tuple[GroupModel, Tensor, TrainingHistory]:
    """
    Run one-shot grouping for a number of epochs.

    Args:
        model: K fully connected branches, normally cloned from a pretrained naive-MTL model.
        assignment: N x K scores, normally from init_assignment().
        suite: training and validation data.
        schedule: temperature per epoch.
        opt: Adam state shared by the weights and the scores.
        epochs: number of passes over the training split.
        batch_size: mini-batch size.
        seed: batch order and Gumbel noise seed.
        plateau: learning-rate decay on validation plateaus (a fresh one when omitted).
        assignment_lr: learning rate of the scores; the weights' rate when omitted.
        noise_rng: Gumbel noise generator; gumbel_generator(seed) when omitted.

    Returns:
        (model, assignment, history), the first two trained in place.
    """
    if assignment_lr is not None:
        opt.lr_scale[ASSIGNMENT_NAME] = assignment_lr / opt.lr
    trainer = OneShotTrainer(model, assignment, suite, schedule, batch_size, seed, plateau, noise_rng)
    history = trainer.fit(epochs, opt)
    return model, assignment, history
