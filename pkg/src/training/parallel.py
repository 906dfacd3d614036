"""
Per-sample work spread over a process pool, results returned in submission
order and reduced sequentially, so a batch gradient is bitwise identical for
any worker count.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from src.utils.errors import ConfigurationError

# Read-only objects shared by every task of a mapper (circuit, model, ...)
_CONTEXT: Dict[str, Any] = {}

Task = Callable[[Dict[str, Any], Any], Any]


def _install(context: Dict[str, Any]) -> None:
    _CONTEXT.clear()
    _CONTEXT.update(context)


def _call(payload):
    task, item = payload
    return task(_CONTEXT, item)


def default_workers() -> int:
    return os.cpu_count() or 1


class SampleMapper:
    """
    Order-preserving map of module-level task functions over samples.

    With workers == 1 everything runs in the calling process. Tasks receive
    the shared context as their first argument.
    """

    def __init__(self, context: Dict[str, Any], workers: Optional[int] = None):
        workers = default_workers() if workers is None else workers
        if workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {workers}")
        self.context = context
        self.workers = workers
        self._executor: Optional[ProcessPoolExecutor] = None
        if workers > 1:
            self._executor = ProcessPoolExecutor(
                max_workers=workers, initializer=_install, initargs=(context,)
            )

    def map(self, task: Task, items: Sequence[Any]) -> List[Any]:
        if self._executor is None:
            _install(self.context)
            return [task(_CONTEXT, item) for item in items]
        chunksize = max(1, len(items) // (self.workers * 4))
        return list(self._executor.map(_call, [(task, item) for item in items], chunksize=chunksize))

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "SampleMapper":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def reduce_mean(gradients: Sequence[np.ndarray]) -> np.ndarray:
    """Mean of per-sample gradients, summed left to right in batch order."""
    if not gradients:
        raise ConfigurationError("cannot reduce an empty batch")
    total = np.array(gradients[0], dtype=np.float64, copy=True)
    for gradient in gradients[1:]:
        total += gradient
    return total / len(gradients)
