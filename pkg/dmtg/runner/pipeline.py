# file: dmtg/runner/pipeline.py

"""
Experiment orchestration.

For every seed: generate the suite, train naive MTL (the NormGain
reference), then the requested methods. DMTG pretrains naive MTL, clones
the encoder K times, trains the model and the assignment scores jointly
and reads out the hard partition. Seeds are independent jobs; records are
persisted in seed order.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from config.experiment_config import ExperimentConfig, validate_config
from config.project_config import BaseConfigurable
from dmtg.baselines import (
    GroupTraining, INIT_NAIVE_MTL, OracleResult, PartitionScore, hoa_pairwise, random_group,
    random_group_generator, run_oracle,
)
from dmtg.grouping import (
    GroupModel, TrainingHistory, count_complexity, extract_partition, gumbel_generator, hard_readout_losses,
    init_assignment, save_checkpoint, train_one_shot,
)
from dmtg.metrics import build_report
from dmtg.partition import Partition
from dmtg.runner.records import RunRecord
from dmtg.runner.results_writer import ResultsWriter
from dmtg.tasksuite import TaskSuite, generate
from logger import set_run_context

CHECKPOINT_DIR = "checkpoints"


@dataclass
class DmtgOutcome:
    partition: Partition
    val_loss: List[float]
    test_loss: List[float]
    history: TrainingHistory
    naive_model: GroupModel
    assignment: np.ndarray


@dataclass
class SeedResult:
    seed: int
    records: List[RunRecord] = field(default_factory=list)
    oracle_rows: List[dict] = field(default_factory=list)
    failed_method: Optional[str] = None
    error: Optional[BaseException] = None


class SeedRun(BaseConfigurable):
    """All requested methods for one seed; owns the suite, the group cache and every RNG."""

    def __init__(self, config: ExperimentConfig, seed: int):
        super().__init__()
        self.cfg = config
        self.seed = seed
        self.config_hash = config.config_hash()
        self.recipe = config.recipe()
        self.k = config.k_groups
        self.budget = config.epochs.total
        self.suite: Optional[TaskSuite] = None
        self.training: Optional[GroupTraining] = None
        self.naive: Optional[PartitionScore] = None
        self.dmtg: Optional[DmtgOutcome] = None
        self.oracle: Optional[OracleResult] = None
        self.naive_seconds = 0.0
        self.current_method = "prepare"

    # ------------------------- Helpers -------------------------
    def _clock(self, start: float) -> float:
        return time.perf_counter() - start if self.cfg.record_wallclock else 0.0

    def _complexity(self, n_encoders: int) -> dict:
        template = self.recipe.build(self.suite.input_dim, self.suite.n_tasks,
                                     [tuple(range(self.suite.n_tasks))], np.random.default_rng(0))
        return count_complexity(template, self.suite.n_tasks, n_encoders).to_dict()

    def _record(self, method: str, partition: Partition, val_loss: Sequence[float], test_loss: Sequence[float],
                wallclock: float, extras: Optional[dict] = None, n_encoders: Optional[int] = None) -> RunRecord:
        report = build_report(val_loss, self.naive.per_task_val_loss, partition.canonical(),
                              self.suite.spec.partition)
        recovery = report.partition_recovery
        record = RunRecord(
            config_hash=self.config_hash,
            method=method,
            seed=self.seed,
            k_groups=self.k,
            n_tasks=self.suite.n_tasks,
            partition=partition.to_string(),
            groups=partition.describe(),
            per_task_val_loss=report.per_task_loss,
            per_task_test_loss=tuple(float(v) for v in test_loss),
            per_task_gain_pct=report.per_task_gain_pct,
            total_loss=report.total_loss,
            mean_normgain_pct=report.mean_norm_gain_pct,
            exact_match=recovery.exact_match,
            rand_index=recovery.rand_index,
            wallclock_s=wallclock,
            complexity=self._complexity(n_encoders or partition.n_groups),
            extras=extras or {},
        )
        self.logger.info(
            f"✅ seed {self.seed} {method}: {partition.describe()} NormGain={record.mean_normgain_pct:+.2f}% "
            f"total={record.total_loss:.4g} rand={record.rand_index:.3f}"
        )
        return record

    def _score_record(self, method: str, score: PartitionScore, start: float, extras: Optional[dict] = None,
                      n_encoders: Optional[int] = None) -> RunRecord:
        return self._record(method, score.partition, score.per_task_val_loss, score.per_task_test_loss,
                            self._clock(start), extras, n_encoders)

    # ------------------------- Methods -------------------------
    def prepare(self) -> None:
        self.suite = generate(self.cfg.planted_spec(self.seed))
        self.training = GroupTraining(self.suite, self.recipe, self.seed)
        start = time.perf_counter()
        self.naive = self.training.train_partition(Partition.all_in_one(self.suite.n_tasks), self.budget)
        self.naive_seconds = self._clock(start)

    def run_naive_mtl(self) -> List[RunRecord]:
        score = self.naive
        return [self._record("naive_mtl", score.partition, score.per_task_val_loss, score.per_task_test_loss,
                             self.naive_seconds)]

    def run_stl(self) -> List[RunRecord]:
        start = time.perf_counter()
        score = self.training.train_partition(Partition.singletons(self.suite.n_tasks), self.budget)
        return [self._score_record("stl", score, start)]

    def run_random(self) -> List[RunRecord]:
        start = time.perf_counter()
        partition = random_group(self.suite.n_tasks, self.k, random_group_generator(self.seed))
        score = self.training.train_partition(partition, self.budget)
        return [self._score_record("random", score, start)]

    def run_hoa(self) -> List[RunRecord]:
        start = time.perf_counter()
        partition = hoa_pairwise(self.suite, self.k, self.budget, training=self.training,
                                 naive_mtl_loss=self.naive.per_task_val_loss)
        score = self.training.train_partition(partition, self.budget)
        return [self._score_record("hoa", score, start)]

    def run_oracle(self) -> List[RunRecord]:
        start = time.perf_counter()
        self.oracle = run_oracle(self.suite, self.k, self.budget, training=self.training,
                                 show_progress=self.config.get_show_progress())
        extras = {"n_partitions": len(self.oracle.scores)}
        return [self._score_record("oracle", self.oracle.best, start, extras)]

    def checkpoint_path(self) -> str:
        """Where the trained one-shot state of this seed is kept."""
        return os.path.join(self.cfg.output_dir, CHECKPOINT_DIR, f"dmtg_seed{self.seed}.npz")

    def one_shot(self) -> DmtgOutcome:
        """Naive-MTL pretraining, K-fold branch cloning, joint training and hard readout."""
        if self.dmtg is not None:
            return self.dmtg
        n = self.suite.n_tasks
        pretrained = self.training.train_group(tuple(range(n)), self.cfg.epochs.pretrain).model
        model = GroupModel.clone_branches(pretrained, self.k)
        assignment = init_assignment(n, self.k)
        opt, plateau, noise_rng = self.recipe.new_adam(), self.recipe.new_plateau(), gumbel_generator(self.seed)
        model, assignment, history = train_one_shot(
            model, assignment, self.suite, self.cfg.temperature, opt, self.cfg.epochs.main,
            batch_size=self.recipe.batch_size, seed=self.seed, plateau=plateau,
            assignment_lr=self.recipe.assignment_lr, noise_rng=noise_rng,
        )
        save_checkpoint(self.checkpoint_path(), model, assignment, self.cfg.temperature, opt, plateau,
                        self.cfg.epochs.main, noise_rng)
        self.dmtg = DmtgOutcome(
            partition=extract_partition(assignment),
            val_loss=hard_readout_losses(model, assignment, self.suite, "val").tolist(),
            test_loss=hard_readout_losses(model, assignment, self.suite, "test").tolist(),
            history=history,
            naive_model=pretrained,
            assignment=assignment.numpy(),
        )
        return self.dmtg

    def run_dmtg(self) -> List[RunRecord]:
        start = time.perf_counter()
        outcome = self.one_shot()
        extras = {
            "raw_partition": "|".join(str(a) for a in outcome.partition.assignment),
            "assignment": outcome.assignment.tolist(),
            "val_total_history": outcome.history.val_totals(),
            "training_complexity": self._complexity(self.k),
            "temperature": self.cfg.temperature.describe(),
        }
        return [self._record("dmtg", outcome.partition, outcome.val_loss, outcome.test_loss,
                             self._clock(start), extras)]

    def run_two_shot(self) -> List[RunRecord]:
        outcome = self.one_shot()
        self.training.register_init(INIT_NAIVE_MTL, outcome.naive_model)
        start = time.perf_counter()
        scratch = self.training.train_partition(outcome.partition, self.budget)
        scratch_record = self._score_record("two_shot_scratch", scratch, start)
        start = time.perf_counter()
        naive_init = self.training.train_partition(outcome.partition, self.cfg.epochs.main, INIT_NAIVE_MTL)
        return [scratch_record, self._score_record("two_shot_naive_init", naive_init, start)]

    def oracle_comparison(self, records: List[RunRecord]) -> None:
        """Attach the oracle's score of DMTG's partition to the DMTG record."""
        if self.oracle is None or self.dmtg is None:
            return
        score = self.oracle.score_of(self.dmtg.partition)
        for record in records:
            if record.method == "dmtg":
                record.extras["oracle_score_of_partition"] = score.aggregate
                record.extras["oracle_best_score"] = self.oracle.best.aggregate
                record.extras["oracle_rank"] = self.oracle.rank_of(self.dmtg.partition)

    def execute(self) -> SeedResult:
        result = SeedResult(seed=self.seed)
        set_run_context(self.seed)
        try:
            self.prepare()
            for method in self.cfg.methods:
                self.current_method = method
                result.records.extend(getattr(self, f"run_{method}")())
            self.oracle_comparison(result.records)
            if self.oracle is not None:
                result.oracle_rows = self.oracle.table_rows()
        except Exception as e:
            self.logger.error(f"❌ seed {self.seed} failed during {self.current_method}: {e}")
            result.failed_method = self.current_method
            result.error = e
        finally:
            set_run_context(None)
        return result


def run_seed(config_data: dict, seed: int) -> SeedResult:
    """Worker entry point; takes plain data so it can cross process boundaries."""
    return SeedRun(validate_config(config_data), seed).execute()


class ExperimentRunner(BaseConfigurable):
    def __init__(self, config: ExperimentConfig, workers: Optional[int] = None):
        super().__init__()
        self.cfg = config
        self.workers = workers if workers is not None else self.config.get_workers()

    def _results(self):
        data = self.cfg.model_dump(mode="json")
        if self.workers <= 1 or len(self.cfg.seeds) == 1:
            for seed in self.cfg.seeds:
                yield run_seed(data, seed)
            return
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(run_seed, data, seed) for seed in self.cfg.seeds]
            # in seed order, whatever the completion order
            for future in futures:
                yield future.result()

    def run(self) -> List[RunRecord]:
        config_hash = self.cfg.config_hash()
        writer = ResultsWriter(self.cfg.output_dir, config_hash, manifest={
            "methods": list(self.cfg.methods),
            "seeds": list(self.cfg.seeds),
            "config": self.cfg.model_dump(mode="json", exclude={"output_dir"}),
        })
        self.logger.info(
            f"Running {self.cfg.methods} on seeds {self.cfg.seeds} (config {config_hash}, workers={self.workers})"
        )
        for result in self._results():
            writer.append(result.records)
            if result.oracle_rows:
                writer.write_table(f"oracle_seed{result.seed}.csv", result.oracle_rows)
            if result.error is not None:
                writer.mark_failed(result.failed_method, result.seed, result.error)
                raise result.error
        self.logger.info(f"✅ {len(writer.records)} records written to {self.cfg.output_dir}")
        return writer.records


def run(config: ExperimentConfig, workers: Optional[int] = None) -> List[RunRecord]:
    return ExperimentRunner(config, workers).run()
