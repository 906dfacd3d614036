"""
Run Artifacts
Checkpoint, metrics (JSON + CSV), manifest and evaluation record.

Floats go through the json module, which writes repr(float): decimal text
that parses back to the identical double.
"""

import csv
import json
import os
from typing import Any, Dict, List

import numpy as np

from src.utils.errors import InvalidInputError
from src.utils.logger import ActionType, log_experiment

CHECKPOINT_FILE = "checkpoint.json"
METRICS_JSON = "metrics.json"
METRICS_CSV = "metrics.csv"
MANIFEST_FILE = "manifest.json"
EVALUATION_FILE = "evaluation.json"
METRIC_COLUMNS = ("epoch", "train_loss", "train_acc", "test_acc")


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_json(path: str, payload: Dict[str, Any]) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(payload), f, indent=2)
    return path


def _read_json(path: str) -> Dict[str, Any]:
    if not os.path.isfile(path):
        raise InvalidInputError(f"file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}") from e


def save_checkpoint(path: str, *, model: str, arch: str, arch_digest: str, classes: str,
                    dataset: str, state: Dict[str, Any], extra: Dict[str, Any] = None) -> str:
    """Parameters, optimizer moments and history of a finished run."""
    payload = {
        "model": model,
        "arch": arch,
        "arch_digest": arch_digest,
        "classes": classes,
        "dataset": dataset,
        "theta": state["theta"],
        "adam_m": state["adam_m"],
        "adam_v": state["adam_v"],
        "step": state["step"],
        "epoch": state["epoch"],
        "history": state["history"],
        **(extra or {}),
    }
    _write_json(path, payload)
    log_experiment("Artifacts", ActionType.CHECKPOINT, {"path": path, "model": model}, "SUCCESS")
    return path


def load_checkpoint(path: str) -> Dict[str, Any]:
    """
    Raises:
        InvalidInputError: missing, unparsable, or without the required keys
    """
    payload = _read_json(path)
    missing = [key for key in ("model", "arch_digest", "classes", "theta") if key not in payload]
    if missing:
        raise InvalidInputError(f"checkpoint {path} lacks {missing}")
    payload["theta"] = np.array(payload["theta"], dtype=np.float64)
    return payload


def write_metrics(out_dir: str, history: List[Dict[str, Any]]) -> Dict[str, str]:
    """metrics.json (all rows) and metrics.csv (one row per epoch)."""
    os.makedirs(out_dir, exist_ok=True)
    json_path = _write_json(os.path.join(out_dir, METRICS_JSON), {"history": history})
    csv_path = os.path.join(out_dir, METRICS_CSV)
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=METRIC_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in history:
            writer.writerow({key: repr(float(row[key])) if isinstance(row[key], (float, np.floating))
                             else _jsonable(row[key]) for key in METRIC_COLUMNS})
    return {"json": json_path, "csv": csv_path}


def read_metrics_csv(path: str) -> List[Dict[str, float]]:
    if not os.path.isfile(path):
        raise InvalidInputError(f"file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(f)]


def write_manifest(out_dir: str, manifest: Dict[str, Any]) -> str:
    return _write_json(os.path.join(out_dir, MANIFEST_FILE), manifest)


def load_manifest(path: str) -> Dict[str, Any]:
    """`path` is a run directory or the manifest file itself."""
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_FILE)
    return _read_json(path)


def write_evaluation(out_dir: str, record: Dict[str, Any]) -> str:
    return _write_json(os.path.join(out_dir, EVALUATION_FILE), record)
