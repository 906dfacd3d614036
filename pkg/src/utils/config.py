"""
Run Configuration
Defaults < preset < recorded manifest config < key=value config file <
command-line flags.

The config file uses the same keys as RunConfig's fields (one `key=value`
per line, `#` comments allowed) and is parsed with python-dotenv.
"""

import math
import os
from typing import Any, Dict, Literal, Mapping, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.circuits.architecture import ArchitectureConfig
from src.data.idx import ClassSubsetSpec, resolve_paths
from src.data.presets import get_preset
from src.tools.artifacts import load_manifest
from src.training.optimizer import BASELINE_LEARNING_RATE, QCNN_LEARNING_RATE, Hyperparams
from src.training.parallel import default_workers
from src.utils.errors import ConfigurationError, InvalidInputError

DATA_DIR_ENV = "QCNN_DATA_DIR"

Command = Literal["train", "eval", "gradcheck", "inspect", "compare", "ingest"]


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, validated."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command = "train"
    model: Literal["qcnn", "baseline"] = "qcnn"

    # architecture
    arch: Literal["full", "reference"] = "full"
    entangler: Literal["cry", "cnot"] = "cry"
    regular_layers: int = Field(default=8, ge=1)
    f3_entanglement: int = 4
    share_sublayers: bool = True
    final_filter: bool = True
    pooling: Literal["average", "max"] = "average"
    decomposed: bool = False

    # data
    preset: Optional[str] = None
    dataset: Literal["mnist", "fashion"] = "mnist"
    classes: str = "0,1,2,3"
    data_dir: Optional[str] = None
    images: Optional[str] = None
    labels: Optional[str] = None
    test_images: Optional[str] = None
    test_labels: Optional[str] = None
    limit: Optional[int] = Field(default=None, ge=1)
    test_limit: Optional[int] = Field(default=None, ge=1)

    # training
    epochs: int = Field(default=50, ge=0)
    lr: Optional[float] = Field(default=None, gt=0)
    batch: int = Field(default=32, ge=1)
    seed: int = 0
    workers: int = Field(default_factory=default_workers, ge=1)
    gradient_method: Literal["sweep", "shifted"] = "sweep"

    # artifacts
    out: str = os.path.join("runs", "latest")
    checkpoint: Optional[str] = None
    manifest: Optional[str] = None

    # gradient check
    samples: int = Field(default=5, ge=1)
    shift: float = math.pi / 2
    toy: bool = False

    @field_validator("classes")
    @classmethod
    def _valid_classes(cls, value: str) -> str:
        return str(ClassSubsetSpec.parse(value))

    @field_validator("f3_entanglement")
    @classmethod
    def _valid_f3_width(cls, value: int) -> int:
        if value not in (3, 4):
            raise ValueError(f"f3_entanglement must be 3 or 4, got {value}")
        return value

    def subset(self) -> ClassSubsetSpec:
        return ClassSubsetSpec.parse(self.classes)

    def architecture_config(self) -> ArchitectureConfig:
        return ArchitectureConfig(
            num_regular_layers=self.regular_layers,
            entangler="cnot" if self.entangler == "cnot" else "parameterized_cry",
            share_across_sublayers=self.share_sublayers,
            include_final_filter=self.final_filter,
            f3_entanglement=self.f3_entanglement,
        )

    def learning_rate(self, model: Optional[str] = None) -> float:
        if self.lr is not None:
            return self.lr
        return BASELINE_LEARNING_RATE if (model or self.model) == "baseline" else QCNN_LEARNING_RATE

    def hyperparams(self, model: Optional[str] = None) -> Hyperparams:
        return Hyperparams(
            learning_rate=self.learning_rate(model),
            epochs=max(1, self.epochs),
            batch_size=self.batch,
            seed=self.seed,
        )

    def split_paths(self, split: str) -> Tuple[str, str]:
        """
        IDX pair for "train" or "test": explicit flags first, then the
        standard names under data_dir.

        Raises:
            ConfigurationError: neither explicit paths nor a data directory
        """
        images, labels = (self.images, self.labels) if split == "train" else (self.test_images, self.test_labels)
        if images and labels:
            return images, labels
        if self.data_dir is None:
            flag = "--images/--labels" if split == "train" else "--test-images/--test-labels"
            raise ConfigurationError(f"no {split} data: pass {flag} or set {DATA_DIR_ENV}")
        return resolve_paths(self.data_dir, self.dataset, split)

    def split_limit(self, split: str) -> Optional[int]:
        if split == "test" and self.test_limit is not None:
            return self.test_limit
        return self.limit


def read_config_file(path: str) -> Dict[str, Any]:
    """
    Raises:
        InvalidInputError: file missing
        ConfigurationError: unknown key
    """
    if not os.path.isfile(path):
        raise InvalidInputError(f"config file not found: {path}")
    values = {key.strip().lower(): value for key, value in dotenv_values(path).items() if value is not None}
    unknown = sorted(set(values) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigurationError(f"unknown keys in {path}: {unknown}")
    return values


# Keys of a recorded config that describe the old invocation, not the run
REPLAY_SKIPPED_KEYS = ("command", "out", "manifest")


def read_manifest_config(path: str) -> Dict[str, Any]:
    """
    The `config` block of a run manifest, as a config layer.

    Raises:
        InvalidInputError: manifest missing or unreadable
        ConfigurationError: no config block, or unknown keys in it
    """
    recorded = load_manifest(path).get("config")
    if not isinstance(recorded, dict):
        raise ConfigurationError(f"manifest {path} has no config block")
    values = {key: value for key, value in recorded.items()
              if value is not None and key not in REPLAY_SKIPPED_KEYS}
    unknown = sorted(set(values) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigurationError(f"unknown keys in manifest {path}: {unknown}")
    return values


def load_run_config(args: Mapping[str, Any], config_file: Optional[str] = None,
                    env: Optional[Mapping[str, str]] = None, manifest: Optional[str] = None) -> RunConfig:
    """
    Merge the configuration layers and validate.

    Args:
        args: Flags actually given on the command line (absent keys fall through)
        config_file: Optional key=value file
        env: Environment (QCNN_DATA_DIR supplies data_dir)
        manifest: Optional run directory or manifest.json whose recorded config
            sits between the preset and the config file

    Raises:
        ConfigurationError: invalid or unknown settings, unknown preset
        InvalidInputError: config file or manifest missing
    """
    env = os.environ if env is None else env
    recorded = read_manifest_config(manifest) if manifest else {}
    file_values = read_config_file(config_file) if config_file else {}
    flags = {key: value for key, value in args.items() if value is not None}

    merged: Dict[str, Any] = {}
    if env.get(DATA_DIR_ENV):
        merged["data_dir"] = env[DATA_DIR_ENV]
    preset_name = flags.get("preset", file_values.get("preset", recorded.get("preset")))
    if preset_name:
        preset = get_preset(preset_name)
        merged.update(dataset=preset.dataset, classes=preset.classes)
    merged.update(recorded)
    merged.update(file_values)
    merged.update(flags)

    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigurationError(f"invalid configuration: {problems}") from e
