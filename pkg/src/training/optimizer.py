"""
Adam optimizer and the training hyperparameters.

m <- b1 m + (1 - b1) g
v <- b2 v + (1 - b2) g^2
theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
"""

from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.utils.errors import InvalidInputError

QCNN_LEARNING_RATE = 0.00005
# Classical baseline default when no rate is given (Keras Adam default)
BASELINE_LEARNING_RATE = 0.001


class Hyperparams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(default=QCNN_LEARNING_RATE, gt=0)
    epochs: int = Field(default=50, ge=1)
    batch_size: int = Field(default=32, ge=1)
    adam_beta1: float = Field(default=0.9, ge=0, lt=1)
    adam_beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_eps: float = Field(default=1e-8, gt=0)
    seed: int = 0
    init_scale: float = Field(default=0.1, ge=0)


def init_parameters(num_params: int, h: Hyperparams) -> np.ndarray:
    """Uniform on [-init_scale, init_scale] from the seeded generator."""
    rng = np.random.default_rng(h.seed)
    return rng.uniform(-h.init_scale, h.init_scale, size=num_params)


def init_train_state(theta: np.ndarray, max_epochs: int = 0) -> Dict:
    """Fresh optimizer state around an initial parameter vector."""
    theta = np.array(theta, dtype=np.float64)
    return {
        "theta": theta,
        "adam_m": np.zeros_like(theta),
        "adam_v": np.zeros_like(theta),
        "step": 0,
        "history": [],
        "epoch": 0,
        "max_epochs": max_epochs,
        "current_phase": "train",
        "pending": {},
        "errors": [],
    }


def adam_step(state: Dict, grad, h: Hyperparams) -> Dict:
    """
    One bias-corrected Adam update; returns a new state dict.

    Raises:
        InvalidInputError: gradient shape differs from theta
    """
    grad = np.asarray(grad, dtype=np.float64)
    theta = state["theta"]
    if grad.shape != theta.shape:
        raise InvalidInputError(f"gradient shape {grad.shape} != parameter shape {theta.shape}")
    step = state["step"] + 1
    m = h.adam_beta1 * state["adam_m"] + (1.0 - h.adam_beta1) * grad
    v = h.adam_beta2 * state["adam_v"] + (1.0 - h.adam_beta2) * grad ** 2
    m_hat = m / (1.0 - h.adam_beta1 ** step)
    v_hat = v / (1.0 - h.adam_beta2 ** step)
    new_theta = theta - h.learning_rate * m_hat / (np.sqrt(v_hat) + h.adam_eps)
    return {**state, "theta": new_theta, "adam_m": m, "adam_v": v, "step": step}

