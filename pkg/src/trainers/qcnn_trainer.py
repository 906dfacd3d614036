"""
QCNN Trainer
Per-sample parameter-shift gradients on the lowered circuit; inference on
the native circuit unless decomposed simulation is requested.
"""

from typing import Any, Callable, Dict, Sequence

import numpy as np

from src.circuits.ir import ParamCircuit, lower
from src.data.encoding import EncodedImage
from src.training.gradients import GradientMethod, forward, sample_loss_and_gradient
from src.training.optimizer import Hyperparams, init_parameters
from src.trainers.base_trainer import BaseTrainer


def qcnn_gradient_task(context: Dict[str, Any], item):
    theta, img = item
    return sample_loss_and_gradient(context["lowered"], theta, img, context["method"])


def qcnn_forward_task(context: Dict[str, Any], item):
    theta, img = item
    return forward(context["inference"], theta, img)


class QCNNTrainer(BaseTrainer):

    def __init__(self, circuit: ParamCircuit, train_set: Sequence[EncodedImage],
                 test_set: Sequence[EncodedImage], h: Hyperparams, workers: int = 1,
                 method: GradientMethod = "sweep", decomposed: bool = False):
        self.circuit = circuit
        self.lowered = lower(circuit)
        self.inference = self.lowered if decomposed else circuit
        self.method = method
        super().__init__("QCNNTrainer", train_set, test_set, h, workers)

    @property
    def parameter_count(self) -> int:
        return self.circuit.num_params

    def initial_parameters(self) -> np.ndarray:
        return init_parameters(self.circuit.num_params, self.h)

    def task_context(self) -> Dict[str, Any]:
        return {"lowered": self.lowered, "inference": self.inference, "method": self.method}

    def gradient_task(self) -> Callable:
        return qcnn_gradient_task

    def forward_task(self) -> Callable:
        return qcnn_forward_task
