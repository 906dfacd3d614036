"""Softmax cross-entropy over the four readout logits."""

from typing import Tuple

import numpy as np

from src.utils.errors import InvalidInputError


def softmax(logits) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - np.max(logits)
    exp = np.exp(shifted)
    return exp / np.sum(exp)


def softmax_cross_entropy(logits, label: int) -> Tuple[float, np.ndarray]:
    """
    Loss -log softmax(logits)[label] and its gradient p - onehot(label).

    Uses max subtraction, so large logits do not overflow.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise InvalidInputError("logits must be finite")
    if not 0 <= label < logits.shape[0]:
        raise InvalidInputError(f"label {label} out of range for {logits.shape[0]} logits")
    shifted = logits - np.max(logits)
    log_norm = np.log(np.sum(np.exp(shifted)))
    loss = float(log_norm - shifted[label])
    grad = np.exp(shifted - log_norm)
    grad[label] -= 1.0
    return loss, grad
