# file: config/experiment_config.py

import hashlib
import json
from typing import List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from dmtg.errors import ConfigError
from dmtg.grouping import TemperatureSchedule, TrainingRecipe
from dmtg.tasksuite import PlantedSpec
from logger import AppLogger

logger = AppLogger().get_logger("experiment_config")

METHODS = ("dmtg", "naive_mtl", "stl", "random", "hoa", "oracle", "two_shot")


class SuiteSection(PlantedSpec):
    """PlantedSpec whose seed may be left out; the run seed is used then."""

    seed: Optional[int] = Field(None, ge=0, lt=2 ** 64)

    def for_run(self, run_seed: int) -> PlantedSpec:
        data = self.model_dump()
        data["seed"] = run_seed if self.seed is None else self.seed
        return PlantedSpec.model_validate(data)


class EpochBudget(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pretrain: int = Field(30, ge=0)
    main: int = Field(40, ge=1)

    @property
    def total(self) -> int:
        return self.pretrain + self.main


class OptimizerSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lr: float = Field(3e-3, gt=0)
    assignment_lr: float = Field(3e-2, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    eps: float = Field(1e-8, gt=0)
    plateau_patience: int = Field(5, ge=1)
    plateau_factor: float = Field(0.5, gt=0, le=1)
    min_lr: float = Field(0.0, ge=0)


class ArchitectureSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    depth: int = Field(2, ge=1)
    width: int = Field(3, ge=1)
    shared_layers: int = Field(0, ge=0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    suite: SuiteSection = Field(default_factory=SuiteSection)
    k_groups: int = Field(3, ge=1)
    epochs: EpochBudget = Field(default_factory=EpochBudget)
    batch_size: int = Field(64, ge=1)
    optimizer: OptimizerSection = Field(default_factory=OptimizerSection)
    temperature: TemperatureSchedule = Field(default_factory=lambda: TemperatureSchedule.fixed(4.0))
    architecture: ArchitectureSection = Field(default_factory=ArchitectureSection)
    methods: List[str] = Field(default_factory=lambda: ["naive_mtl", "dmtg"])
    seeds: List[int] = Field(default_factory=lambda: [0])
    output_dir: str = "results"
    record_wallclock: bool = True

    @model_validator(mode="after")
    def _check_cross_fields(self):
        if self.architecture.shared_layers >= self.architecture.depth:
            raise ValueError(
                f"architecture.shared_layers: must be below architecture.depth "
                f"({self.architecture.depth}), got {self.architecture.shared_layers}"
            )
        if not self.methods:
            raise ValueError("methods: at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"methods: unknown {unknown}, expected a subset of {list(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods: duplicates")
        if not self.seeds:
            raise ValueError("seeds: at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds: duplicates")
        if any(s < 0 or s >= 2 ** 64 for s in self.seeds):
            raise ValueError("seeds: every seed must be a 64-bit unsigned integer")
        return self

    # ------------------------- Derived views -------------------------
    def recipe(self) -> TrainingRecipe:
        opt, arch = self.optimizer, self.architecture
        return TrainingRecipe(
            width=arch.width, depth=arch.depth, shared_layers=arch.shared_layers,
            batch_size=self.batch_size, lr=opt.lr, assignment_lr=opt.assignment_lr,
            beta1=opt.beta1, beta2=opt.beta2, eps=opt.eps,
            plateau_patience=opt.plateau_patience, plateau_factor=opt.plateau_factor, min_lr=opt.min_lr,
        )

    def planted_spec(self, run_seed: int) -> PlantedSpec:
        return self.suite.for_run(run_seed)

    def config_hash(self) -> str:
        """First 16 hex digits of SHA-256 over the canonical JSON, output_dir excluded."""
        payload = self.model_dump(mode="json", exclude={"output_dir"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def with_overrides(self, output_dir: Optional[str] = None, seeds: Optional[List[int]] = None,
                       methods: Optional[List[str]] = None) -> "ExperimentConfig":
        data = self.model_dump(mode="json")
        if output_dir is not None:
            data["output_dir"] = output_dir
        if seeds is not None:
            data["seeds"] = seeds
        if methods is not None:
            data["methods"] = methods
        return validate_config(data)


def _describe_error(error: ValidationError):
    """(field, message) of the first problem; cross-field checks name their field before a colon."""
    first = error.errors()[0]
    loc = ".".join(str(part) for part in first["loc"])
    message = first["msg"].removeprefix("Value error, ")
    if not loc and ": " in message:
        loc, message = message.split(": ", 1)
    return loc or "<config>", message


def validate_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        field, message = _describe_error(e)
        logger.error(f"❌ Invalid experiment config at '{field}': {message}")
        raise ConfigError(field, message) from e


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError as e:
        logger.error(f"❌ Config file not found: {path}")
        raise ConfigError("<file>", f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        logger.error(f"❌ Config file {path} is not valid YAML: {e}")
        raise ConfigError("<file>", f"invalid YAML: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "the config must be a mapping")
    config = validate_config(data)
    logger.info(f"Loaded config {path} (hash {config.config_hash()})")
    return config
