"""Quantum training entry point."""

from typing import Optional, Sequence

from src.circuits.ir import ParamCircuit
from src.data.encoding import EncodedImage
from src.training.gradients import GradientMethod
from src.training.optimizer import Hyperparams
from src.trainers.qcnn_trainer import QCNNTrainer
from src.workflow.orchestrator import TrainingOrchestrator
from src.workflow.state import TrainState


def train(circuit: ParamCircuit, train_set: Sequence[EncodedImage], test_set: Sequence[EncodedImage],
          h: Hyperparams, workers: int = 1, epochs: Optional[int] = None,
          method: GradientMethod = "sweep", decomposed: bool = False) -> TrainState:
    """
    Adam on the mean per-sample parameter-shift gradient, one history row per
    epoch. `epochs` overrides h.epochs (0 returns the initial parameters).
    """
    epochs = h.epochs if epochs is None else epochs
    with QCNNTrainer(circuit, train_set, test_set, h, workers, method, decomposed) as trainer:
        return TrainingOrchestrator(trainer).execute(epochs)
