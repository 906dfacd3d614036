"""
Workflow State Definition
The training state every node reads and returns updates for.
"""

from typing import Any, Dict, List, Literal, TypedDict

import numpy as np


class EpochMetrics(TypedDict):
    epoch: int
    train_loss: float
    train_acc: float
    test_acc: float


class TrainState(TypedDict):
    """
    Optimizer state plus loop bookkeeping.

    history holds one EpochMetrics row per completed epoch.
    """

    # === PARAMETERS AND OPTIMIZER ===
    theta: np.ndarray
    adam_m: np.ndarray
    adam_v: np.ndarray
    step: int  # Adam updates applied so far

    # === LOOP CONTROL ===
    epoch: int  # Completed epochs
    max_epochs: int
    current_phase: Literal["train", "evaluate", "done", "error"]

    # === RESULTS ===
    history: List[EpochMetrics]
    pending: Dict[str, Any]  # Train metrics of the epoch awaiting evaluation
    errors: List[str]
