"""Classical baseline training entry point."""

from typing import Optional, Sequence

from src.baseline.cnn import PoolKind
from src.data.idx import BaselineSample
from src.training.optimizer import Hyperparams
from src.trainers.baseline_trainer import BaselineTrainer
from src.workflow.orchestrator import TrainingOrchestrator
from src.workflow.state import TrainState


def baseline_train(train_set: Sequence[BaselineSample], test_set: Sequence[BaselineSample],
                   h: Hyperparams, workers: int = 1, epochs: Optional[int] = None,
                   pooling: PoolKind = "average") -> TrainState:
    """Softmax cross-entropy + Adam on the 188-parameter CNN; same state and history as train()."""
    epochs = h.epochs if epochs is None else epochs
    with BaselineTrainer(train_set, test_set, h, workers, pooling) as trainer:
        return TrainingOrchestrator(trainer).execute(epochs)
