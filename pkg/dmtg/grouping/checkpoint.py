"""
One-shot training checkpoints.

A checkpoint is a .npz archive: every model parameter under its name, the
assignment scores, the Adam moments, and a JSON header with the schema tag,
the architecture, the temperature schedule, the epoch, the optimizer and
plateau state and the Gumbel generator state.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from dmtg.autodiff import Tensor, AdamState, PlateauScheduler
from dmtg.errors import ShapeError
from dmtg.grouping.assignment import ASSIGNMENT_NAME
from dmtg.grouping.model import GroupModel
from dmtg.grouping.relaxation import TemperatureSchedule
from logger import AppLogger

logger = AppLogger().get_logger("checkpoint")

CHECKPOINT_SCHEMA = "dmtg-checkpoint/1"


@dataclass
class Checkpoint:
    model: GroupModel
    assignment: Tensor
    schedule: TemperatureSchedule
    opt: AdamState
    plateau: PlateauScheduler
    epoch: int
    rng: np.random.Generator


def save_checkpoint(path: str, model: GroupModel, assignment: Tensor, schedule: TemperatureSchedule,
                    opt: AdamState, plateau: PlateauScheduler, epoch: int, rng: np.random.Generator) -> str:
    header = {
        "schema": CHECKPOINT_SCHEMA,
        "architecture": model.architecture(),
        "schedule": schedule.model_dump(mode="json"),
        "epoch": epoch,
        "adam": opt.state_dict(),
        "plateau": plateau.state_dict(),
        "rng": rng.bit_generator.state,
    }
    arrays = dict(model.named_arrays())
    if ASSIGNMENT_NAME in arrays:
        raise ShapeError(f"parameter name '{ASSIGNMENT_NAME}' is reserved for the assignment scores")
    arrays[ASSIGNMENT_NAME] = assignment.values
    arrays.update(opt.moments())
    arrays["header"] = np.array(json.dumps(header, sort_keys=True))

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = path + ".tmp"
    with open(tmp_path, "wb") as f:
        np.savez(f, **arrays)
    os.replace(tmp_path, path)
    logger.debug(f"Checkpoint for epoch {epoch} written to {path}")
    return path


def load_checkpoint(path: str) -> Checkpoint:
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("schema") != CHECKPOINT_SCHEMA:
            logger.error(f"Unsupported checkpoint schema {header.get('schema')!r} in {path}")
            raise ShapeError(f"unsupported checkpoint schema {header.get('schema')!r}")
        arrays = {name: data[name] for name in data.files if name != "header"}

    model = GroupModel.from_architecture(header["architecture"])
    model.load_arrays(arrays)
    assignment = Tensor(arrays[ASSIGNMENT_NAME], requires_grad=True, name=ASSIGNMENT_NAME)
    opt = AdamState.from_state(header["adam"], arrays)

    state = header["rng"]
    if state.get("bit_generator") != "PCG64":
        raise ShapeError(f"unsupported generator {state.get('bit_generator')!r}")
    bit_generator = np.random.PCG64()
    bit_generator.state = state

    return Checkpoint(
        model=model,
        assignment=assignment,
        schedule=TemperatureSchedule.model_validate(header["schedule"]),
        opt=opt,
        plateau=PlateauScheduler.from_state(header["plateau"]),
        epoch=header["epoch"],
        rng=np.random.Generator(bit_generator),
    )
