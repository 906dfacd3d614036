"""
Training Orchestrator
Runs one trainer through the epoch graph and returns the final state.
"""

from typing import Any, Dict

from src.trainers.base_trainer import BaseTrainer
from src.utils.errors import QCNNError

from .graph import create_training_graph, recursion_limit
from .state import TrainState


class TrainingOrchestrator:
    """
    Drives the train -> evaluate loop for one model.
    """

    def __init__(self, trainer: BaseTrainer):
        self.trainer = trainer
        self.graph = create_training_graph(trainer)

    def execute(self, epochs: int) -> TrainState:
        """
        Train for `epochs` epochs (0 evaluates nothing and returns the
        initial parameters with an empty history).

        Raises:
            QCNNError: the failure a node reported
        """
        print(f"\n{'=' * 60}")
        print(f"[ORCHESTRATOR] {self.trainer.name}: {epochs} epoch(s), "
              f"{len(self.trainer.train_set)} train / {len(self.trainer.test_set)} test samples")
        print(f"{'=' * 60}")

        initial: Dict[str, Any] = self.trainer.init_state(epochs)
        if epochs == 0:
            return {**initial, "current_phase": "done"}

        final = self.graph.invoke(initial, config={"recursion_limit": recursion_limit(epochs)})
        if final.get("current_phase") == "error":
            failure = self.trainer.failure
            if isinstance(failure, QCNNError):
                raise failure
            raise QCNNError("; ".join(final.get("errors") or ["training failed"]))

        history = final["history"]
        if history:
            last = history[-1]
            print(f"[ORCHESTRATOR] done: train_loss={last['train_loss']:.6f} test_acc={last['test_acc']:.4f}")
        return {**final, "current_phase": "done"}
