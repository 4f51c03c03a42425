from dataclasses import dataclass, field, asdict
from typing import Dict, Optional, Tuple

RESULTS_CSV_SCHEMA = "dmtg-results-csv/1"
RECORDS_JSONL_SCHEMA = "dmtg-records/1"

RESULT_COLUMNS = [
    "config_hash", "method", "seed", "K", "N", "partition", "total_loss",
    "mean_normgain_pct", "exact_match", "rand_index", "wallclock_s",
]

# encoder cost growth with the number of tasks, per method
RELATIVE_ENCODER_COMPLEXITY = {
    "naive_mtl": "1",
    "stl": "O(N)",
    "random": "O(K)",
    "hoa": "O(N^2)+O(K)",
    "oracle": "O(S(N,<=K))",
    "dmtg": "O(K)",
    "two_shot_scratch": "O(K)",
    "two_shot_naive_init": "O(K)",
}


@dataclass
class RunRecord:
    config_hash: str
    method: str
    seed: int
    k_groups: int
    n_tasks: int
    partition: str
    groups: str
    per_task_val_loss: Tuple[float, ...]
    per_task_test_loss: Tuple[float, ...]
    per_task_gain_pct: Tuple[float, ...]
    total_loss: float
    mean_normgain_pct: float
    exact_match: Optional[bool]
    rand_index: Optional[float]
    wallclock_s: float
    complexity: Dict[str, float] = field(default_factory=dict)
    extras: Dict[str, object] = field(default_factory=dict)

    def csv_row(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "method": self.method,
            "seed": self.seed,
            "K": self.k_groups,
            "N": self.n_tasks,
            "partition": self.partition,
            "total_loss": self.total_loss,
            "mean_normgain_pct": self.mean_normgain_pct,
            "exact_match": self.exact_match,
            "rand_index": self.rand_index,
            "wallclock_s": self.wallclock_s,
        }

    def to_json(self) -> dict:
        data = asdict(self)
        data["schema"] = RECORDS_JSONL_SCHEMA
        for key in ("per_task_val_loss", "per_task_test_loss", "per_task_gain_pct"):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        data = dict(data)
        data.pop("schema", None)
        for key in ("per_task_val_loss", "per_task_test_loss", "per_task_gain_pct"):
            data[key] = tuple(data[key])
        return cls(**data)
