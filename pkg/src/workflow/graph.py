"""
LangGraph Workflow Construction
Epoch loop: train -> evaluate -> (train again | done | error).
"""

from langgraph.graph import END, StateGraph

from src.trainers.base_trainer import BaseTrainer

from .conditions import should_continue
from .nodes import error_node, evaluate_node, train_node
from .state import TrainState

# Graph steps taken per epoch (train + evaluate)
STEPS_PER_EPOCH = 2


def create_training_graph(trainer: BaseTrainer):
    """
    Build the epoch loop around one trainer.

        START -> TRAIN -> EVALUATE -> should_continue:
            "train" -> TRAIN
            "done"  -> END
            "error" -> ERROR -> END
    """
    workflow = StateGraph(TrainState)

    def train(state: TrainState):
        return train_node(state, trainer)

    def evaluate(state: TrainState):
        return evaluate_node(state, trainer)

    workflow.add_node("train", train)
    workflow.add_node("evaluate", evaluate)
    workflow.add_node("error", error_node)

    workflow.set_entry_point("train")
    workflow.add_edge("train", "evaluate")
    workflow.add_conditional_edges(
        "evaluate",
        should_continue,
        {"train": "train", "done": END, "error": "error"},
    )
    workflow.add_edge("error", END)
    return workflow.compile()


def recursion_limit(max_epochs: int) -> int:
    return STEPS_PER_EPOCH * max_epochs + 5
