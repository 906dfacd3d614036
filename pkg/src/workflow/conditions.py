"""
Workflow Conditions
Routing after each evaluation.
"""

from typing import Literal

from .state import TrainState


def should_continue(state: TrainState) -> Literal["train", "done", "error"]:
    """
    Returns:
        "train" - epochs remain
        "done" - max_epochs reached
        "error" - a node reported a failure
    """
    if state.get("current_phase") == "error":
        return "error"
    if state.get("epoch", 0) < state.get("max_epochs", 0):
        return "train"
    return "done"
