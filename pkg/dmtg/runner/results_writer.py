# file: dmtg/runner/results_writer.py

import json
import os
from typing import List, Optional

import pandas as pd

from config.project_config import BaseConfigurable
from dmtg.runner.records import RESULT_COLUMNS, RESULTS_CSV_SCHEMA, RECORDS_JSONL_SCHEMA, RunRecord

RESULTS_CSV = "results.csv"
RECORDS_JSONL = "records.jsonl"
MANIFEST_JSON = "manifest.json"
FAILED_JSON = "FAILED.json"


def atomic_write_text(path: str, text: str) -> None:
    tmp_path = path + ".tmp"
    with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp_path, path)


def records_frame(records: List[RunRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.csv_row() for r in records], columns=RESULT_COLUMNS)


class ResultsWriter(BaseConfigurable):
    """
    Owns one output directory. Every append rewrites results.csv and
    records.jsonl through a temporary file and a rename, so a killed run
    leaves the records completed so far intact.
    """

    def __init__(self, output_dir: str, config_hash: str, manifest: Optional[dict] = None):
        super().__init__()
        self.output_dir = output_dir
        self.config_hash = config_hash
        self.records: List[RunRecord] = []
        os.makedirs(output_dir, exist_ok=True)
        failed = os.path.join(output_dir, FAILED_JSON)
        if os.path.exists(failed):
            os.remove(failed)
        header = {
            "csv_schema": RESULTS_CSV_SCHEMA,
            "jsonl_schema": RECORDS_JSONL_SCHEMA,
            "config_hash": config_hash,
            **(manifest or {}),
        }
        atomic_write_text(os.path.join(output_dir, MANIFEST_JSON), json.dumps(header, indent=2, sort_keys=True) + "\n")

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def append(self, records: List[RunRecord]) -> None:
        if not records:
            return
        self.records.extend(records)
        self._flush()

    def _flush(self) -> None:
        csv_text = records_frame(self.records).to_csv(index=False, lineterminator="\n")
        atomic_write_text(self.path(RESULTS_CSV), csv_text)
        lines = [json.dumps(r.to_json(), sort_keys=True) for r in self.records]
        atomic_write_text(self.path(RECORDS_JSONL), "\n".join(lines) + "\n")
        self.logger.debug(f"Flushed {len(self.records)} records to {self.output_dir}")

    def write_table(self, name: str, rows: List[dict]) -> str:
        path = self.path(name)
        atomic_write_text(path, pd.DataFrame(rows).to_csv(index=False, lineterminator="\n"))
        return path

    def mark_failed(self, method: str, seed: int, error: BaseException) -> str:
        payload = {
            "config_hash": self.config_hash,
            "method": method,
            "seed": seed,
            "error_type": type(error).__name__,
            "message": str(error),
            "completed_records": len(self.records),
        }
        path = self.path(FAILED_JSON)
        atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        self.logger.error(f"❌ Run failed in {method} (seed {seed}); partial results kept in {self.output_dir}")
        return path


def read_records(records_dir: str) -> List[RunRecord]:
    path = os.path.join(records_dir, RECORDS_JSONL)
    if not os.path.isfile(path):
        return []
    with open(path, "r", encoding="utf-8") as f:
        return [RunRecord.from_json(json.loads(line)) for line in f if line.strip()]
