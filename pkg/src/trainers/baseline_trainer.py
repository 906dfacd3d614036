"""
Baseline Trainer
Backprop gradients of the 188-parameter CNN, same loop and metrics as the
quantum trainer.
"""

from typing import Any, Callable, Dict, Sequence

import numpy as np

from src.baseline.cnn import BaselineModel, PoolKind, baseline_backward, baseline_forward, build_baseline
from src.data.idx import BaselineSample
from src.training.losses import softmax_cross_entropy
from src.training.optimizer import Hyperparams
from src.trainers.base_trainer import BaseTrainer


def baseline_gradient_task(context: Dict[str, Any], item):
    params, sample = item
    model = BaselineModel(params, context["pooling"])
    logits, cache = baseline_forward(model, sample.pixels, return_cache=True)
    loss, dl_dlogits = softmax_cross_entropy(logits, sample.label)
    return loss, logits, baseline_backward(model, cache, dl_dlogits)


def baseline_forward_task(context: Dict[str, Any], item):
    params, sample = item
    return baseline_forward(BaselineModel(params, context["pooling"]), sample.pixels)


class BaselineTrainer(BaseTrainer):

    def __init__(self, train_set: Sequence[BaselineSample], test_set: Sequence[BaselineSample],
                 h: Hyperparams, workers: int = 1, pooling: PoolKind = "average"):
        self.model = build_baseline(h.seed, h.init_scale, pooling)
        super().__init__("BaselineTrainer", train_set, test_set, h, workers)

    @property
    def parameter_count(self) -> int:
        return self.model.parameter_count

    def initial_parameters(self) -> np.ndarray:
        return self.model.params.copy()

    def task_context(self) -> Dict[str, Any]:
        return {"pooling": self.model.pooling}

    def gradient_task(self) -> Callable:
        return baseline_gradient_task

    def forward_task(self) -> Callable:
        return baseline_forward_task
