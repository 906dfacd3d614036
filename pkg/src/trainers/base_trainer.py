"""
Base Trainer Class
The quantum and classical trainers inherit the epoch loop from this class
and supply the per-sample tasks.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.training.gradients import score_logits
from src.training.optimizer import Hyperparams, adam_step, init_train_state
from src.training.parallel import SampleMapper, reduce_mean
from src.utils.logger import ActionType, log_experiment


class BaseTrainer(ABC):
    """
    One model, its datasets and a worker pool.

    train_epoch and evaluate_epoch take the workflow state and return the
    updates to merge into it.
    """

    def __init__(self, name: str, train_set: Sequence, test_set: Sequence,
                 h: Hyperparams, workers: int = 1):
        self.name = name
        self.train_set = list(train_set)
        self.test_set = list(test_set)
        self.h = h
        self.failure: Optional[Exception] = None
        self.mapper = SampleMapper(self.task_context(), workers)
        self._log(f"created ({self.parameter_count} parameters, {self.mapper.workers} worker(s))")

    # --- hooks ---

    @property
    @abstractmethod
    def parameter_count(self) -> int:
        pass

    @abstractmethod
    def initial_parameters(self) -> np.ndarray:
        pass

    @abstractmethod
    def task_context(self) -> Dict[str, Any]:
        """Read-only objects every worker needs."""

    @abstractmethod
    def gradient_task(self) -> Callable:
        """Module-level fn(context, (params, sample)) -> (loss, logits, grad)."""

    @abstractmethod
    def forward_task(self) -> Callable:
        """Module-level fn(context, (params, sample)) -> logits."""

    # --- loop ---

    def init_state(self, max_epochs: int) -> Dict[str, Any]:
        return init_train_state(self.initial_parameters(), max_epochs)

    def batch_gradient(self, params: np.ndarray, batch: Sequence) -> Tuple[List[float], List[np.ndarray], np.ndarray]:
        """Per-sample losses and logits, and their mean gradient in batch order."""
        results = self.mapper.map(self.gradient_task(), [(params, sample) for sample in batch])
        losses = [r[0] for r in results]
        logits = [r[1] for r in results]
        return losses, logits, reduce_mean([r[2] for r in results])

    def train_epoch(self, state: Dict[str, Any]) -> Dict[str, Any]:
        """Shuffle with a per-epoch generator, then one Adam step per batch."""
        epoch = state["epoch"] + 1
        order = np.random.default_rng([self.h.seed, epoch]).permutation(len(self.train_set))
        losses: List[float] = []
        correct = 0
        for start in range(0, len(order), self.h.batch_size):
            batch = [self.train_set[i] for i in order[start:start + self.h.batch_size]]
            batch_losses, batch_logits, grad = self.batch_gradient(state["theta"], batch)
            losses.extend(batch_losses)
            correct += sum(int(np.argmax(row)) == sample.label for row, sample in zip(batch_logits, batch))
            state = adam_step(state, grad, self.h)

        train_loss = float(np.mean(losses))
        train_acc = correct / len(self.train_set)
        self._log(f"epoch {epoch}/{state['max_epochs']} loss={train_loss:.6f} train_acc={train_acc:.4f}")
        log_experiment(self.name, ActionType.TRAIN_EPOCH,
                       {"epoch": epoch, "train_loss": train_loss, "train_acc": train_acc,
                        "step": state["step"]}, "SUCCESS")
        return {
            "theta": state["theta"],
            "adam_m": state["adam_m"],
            "adam_v": state["adam_v"],
            "step": state["step"],
            "epoch": epoch,
            "pending": {"train_loss": train_loss, "train_acc": train_acc},
        }

    def evaluate(self, params: np.ndarray, dataset: Sequence) -> Tuple[float, np.ndarray]:
        """Accuracy and confusion matrix of `params` on `dataset`."""
        logits = self.mapper.map(self.forward_task(), [(params, sample) for sample in dataset])
        return score_logits(dataset, logits)

    def evaluate_epoch(self, state: Dict[str, Any]) -> Dict[str, Any]:
        test_acc, _ = self.evaluate(state["theta"], self.test_set)
        row = {"epoch": state["epoch"], **state["pending"], "test_acc": test_acc}
        self._log(f"epoch {state['epoch']} test_acc={test_acc:.4f}")
        log_experiment(self.name, ActionType.EVALUATION,
                       {"epoch": state["epoch"], "accuracy": test_acc, "split": "test"}, "SUCCESS")
        return {"history": [*state["history"], row], "pending": {}}

    # --- lifecycle ---

    def close(self) -> None:
        self.mapper.close()

    def __enter__(self) -> "BaseTrainer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _create_error_result(self, state: Dict[str, Any], error: Exception) -> Dict[str, Any]:
        self.failure = error
        return {
            "current_phase": "error",
            "errors": [*(state.get("errors") or []), f"{self.name}: {error}"],
        }

    def _log(self, message: str):
        print(f"[{self.name}] {message}")
