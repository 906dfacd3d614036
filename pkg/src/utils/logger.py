import json
import os
import uuid
from datetime import datetime
from enum import Enum

# Experiment log path; main.py points it into the run's output directory
LOG_FILE = os.path.join("logs", "experiment_data.json")


class ActionType(str, Enum):
    """
    Action categories recorded in the experiment log.
    """
    DATA_INGEST = "DATA_INGEST"        # IDX parsing, subset selection
    TRAIN_EPOCH = "TRAIN_EPOCH"        # one completed epoch
    EVALUATION = "EVALUATION"          # accuracy / confusion on a dataset
    GRADIENT_CHECK = "GRADIENT_CHECK"  # parameter-shift vs finite differences
    INSPECTION = "INSPECTION"          # circuit dump and parameter count
    CHECKPOINT = "CHECKPOINT"          # checkpoint written or loaded


# Keys that must be present in `details` for each action
REQUIRED_DETAILS = {
    ActionType.DATA_INGEST: ["dataset", "records"],
    ActionType.TRAIN_EPOCH: ["epoch", "train_loss"],
    ActionType.EVALUATION: ["accuracy"],
    ActionType.GRADIENT_CHECK: ["max_deviation"],
    ActionType.INSPECTION: ["parameters"],
    ActionType.CHECKPOINT: ["path"],
}

VALID_STATUSES = ("SUCCESS", "FAILURE")


def set_log_file(path: str) -> None:
    """Redirect the experiment log (usually into the run's output directory)."""
    global LOG_FILE
    LOG_FILE = path


def get_log_file() -> str:
    return LOG_FILE


def log_experiment(component: str, action: ActionType, details: dict, status: str):
    """
    Append one record to the experiment log.

    Args:
        component (str): Emitting component (e.g. "QCNNTrainer", "CLI").
        action (ActionType): Action type (enum or its string value).
        details (dict): Action payload; must hold the keys listed in REQUIRED_DETAILS.
        status (str): "SUCCESS" or "FAILURE".

    Raises:
        ValueError: Unknown action or status, or missing required detail keys.
    """

    # --- 1. action validation ---
    valid_actions = [a.value for a in ActionType]
    if isinstance(action, ActionType):
        action_enum = action
    elif action in valid_actions:
        action_enum = ActionType(action)
    else:
        raise ValueError(f"Invalid action: '{action}'. Use ActionType (e.g. ActionType.TRAIN_EPOCH).")

    if status not in VALID_STATUSES:
        raise ValueError(f"Invalid status: '{status}'. Expected one of {VALID_STATUSES}.")

    # --- 2. required payload ---
    missing_keys = [key for key in REQUIRED_DETAILS[action_enum] if key not in details]
    if missing_keys:
        raise ValueError(
            f"Logging error (component: {component}): "
            f"keys {missing_keys} are missing from 'details' for action {action_enum.value}."
        )

    # --- 3. entry ---
    log_dir = os.path.dirname(LOG_FILE)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)

    entry = {
        "id": str(uuid.uuid4()),
        "timestamp": datetime.now().isoformat(),
        "component": component,
        "action": action_enum.value,
        "details": details,
        "status": status
    }

    # --- 4. read & rewrite ---
    data = []
    if os.path.exists(LOG_FILE):
        try:
            with open(LOG_FILE, 'r', encoding='utf-8') as f:
                content = f.read().strip()
                if content:
                    data = json.loads(content)
        except json.JSONDecodeError:
            print(f"[LOG] Warning: {LOG_FILE} was corrupted. Starting a new list.")
            data = []

    data.append(entry)

    with open(LOG_FILE, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=4, ensure_ascii=False)
