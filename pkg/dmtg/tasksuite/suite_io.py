"""
Suite export/import.

A suite file is a NumPy .npz archive holding a JSON header (schema tag and
the PlantedSpec) plus row-major float64 arrays: bases_<g>, weights, and
x_<split>, y_<split>, signal_<split> for train, val and test.
"""

import json
import os

import numpy as np

from dmtg.errors import ShapeError
from dmtg.tasksuite.planted_spec import PlantedSpec
from dmtg.tasksuite.suite import SPLITS, TaskSuite
from logger import AppLogger

logger = AppLogger().get_logger("suite_io")

SUITE_SCHEMA = "dmtg-suite/1"


def save_suite(suite: TaskSuite, path: str) -> str:
    header = {"schema": SUITE_SCHEMA, "spec": suite.spec.model_dump(mode="json")}
    arrays = {"header": np.array(json.dumps(header, sort_keys=True)), "weights": suite.weights}
    for g, basis in enumerate(suite.bases):
        arrays[f"bases_{g}"] = basis
    for split in SPLITS:
        arrays[f"x_{split}"] = suite.x[split]
        arrays[f"y_{split}"] = suite.y[split]
        arrays[f"signal_{split}"] = suite.signal[split]

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = path + ".tmp"
    with open(tmp_path, "wb") as f:
        np.savez(f, **arrays)
    os.replace(tmp_path, path)
    logger.info(f"Suite written to {path}")
    return path


def load_suite(path: str) -> TaskSuite:
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("schema") != SUITE_SCHEMA:
            logger.error(f"Unsupported suite schema {header.get('schema')!r} in {path}")
            raise ShapeError(f"unsupported suite schema {header.get('schema')!r}")
        spec = PlantedSpec.model_validate(header["spec"])
        bases = [data[f"bases_{g}"] for g in range(spec.n_groups)]
        suite = TaskSuite(spec=spec, bases=bases, weights=data["weights"])
        for split in SPLITS:
            suite.x[split] = data[f"x_{split}"]
            suite.y[split] = data[f"y_{split}"]
            suite.signal[split] = data[f"signal_{split}"]
    return suite
