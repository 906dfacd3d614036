"""
Workflow Nodes
Each node wraps one trainer step and returns state updates.
"""

from typing import Any, Dict

from src.trainers.base_trainer import BaseTrainer
from src.utils.errors import QCNNError

from .state import TrainState


def train_node(state: TrainState, trainer: BaseTrainer) -> Dict[str, Any]:
    """One pass over the shuffled training set."""
    try:
        updates = trainer.train_epoch(state)
    except QCNNError as e:
        return trainer._create_error_result(state, e)
    updates["current_phase"] = "evaluate"
    return updates


def evaluate_node(state: TrainState, trainer: BaseTrainer) -> Dict[str, Any]:
    """Test accuracy of the current parameters; appends the history row."""
    if state.get("current_phase") == "error":
        return {"current_phase": "error"}
    try:
        updates = trainer.evaluate_epoch(state)
    except QCNNError as e:
        return trainer._create_error_result(state, e)
    updates["current_phase"] = "train"
    return updates


def error_node(state: TrainState) -> Dict[str, Any]:
    print("\n" + "=" * 60)
    print("[ERROR] Training stopped")
    print("=" * 60)
    return {"current_phase": "error"}
