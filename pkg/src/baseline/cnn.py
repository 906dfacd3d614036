"""
Classical CNN Baseline (188 parameters)

    input 28x28
    conv1 3x3 stride 2, same padding   -> 14x14   (9 + 1)
    ReLU
    conv2 3x3 stride 1, valid          -> 12x12   (9 + 1)
    ReLU
    pool 2x2 (average, or max)         -> 6x6
    flatten row-major                  -> 36
    dense1 36 -> 4, ReLU                          (144 + 4)
    dense2 4 -> 4, logits                         (16 + 4)

Same padding with stride 2 on an even side puts the single padded row and
column at the bottom and right.
"""

import hashlib
from dataclasses import dataclass
from typing import Dict, Literal, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.utils.errors import InvalidInputError

INPUT_SIDE = 28
KERNEL = 3
CONV1_SIDE = 14
CONV2_SIDE = 12
POOL_SIDE = 6
HIDDEN = 4
NUM_CLASSES = 4

# (name, shape) in packing order
PARAMETER_LAYOUT: Tuple[Tuple[str, Tuple[int, ...]], ...] = (
    ("conv1_kernel", (KERNEL, KERNEL)),
    ("conv1_bias", ()),
    ("conv2_kernel", (KERNEL, KERNEL)),
    ("conv2_bias", ()),
    ("dense1_weight", (POOL_SIDE * POOL_SIDE, HIDDEN)),
    ("dense1_bias", (HIDDEN,)),
    ("dense2_weight", (HIDDEN, NUM_CLASSES)),
    ("dense2_bias", (NUM_CLASSES,)),
)

PoolKind = Literal["average", "max"]


def _size(shape: Tuple[int, ...]) -> int:
    return int(np.prod(shape)) if shape else 1


NUM_PARAMETERS = sum(_size(shape) for _, shape in PARAMETER_LAYOUT)


@dataclass
class BaselineModel:
    """Flat parameter vector plus the pooling kind."""
    params: np.ndarray
    pooling: PoolKind = "average"

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=np.float64).reshape(-1)
        if self.params.shape != (NUM_PARAMETERS,):
            raise InvalidInputError(f"expected {NUM_PARAMETERS} parameters, got {self.params.shape[0]}")
        if self.pooling not in ("average", "max"):
            raise InvalidInputError(f"unknown pooling '{self.pooling}'")

    def unpack(self) -> Dict[str, np.ndarray]:
        return unpack_parameters(self.params)

    @property
    def parameter_count(self) -> int:
        return NUM_PARAMETERS


def unpack_parameters(flat: np.ndarray) -> Dict[str, np.ndarray]:
    """Named views into a flat parameter vector."""
    out = {}
    start = 0
    for name, shape in PARAMETER_LAYOUT:
        size = _size(shape)
        out[name] = flat[start:start + size].reshape(shape)
        start += size
    return out


def pack_parameters(named: Dict[str, np.ndarray]) -> np.ndarray:
    return np.concatenate([np.asarray(named[name], dtype=np.float64).reshape(-1)
                           for name, _ in PARAMETER_LAYOUT])


def layer_table() -> Tuple[Tuple[str, str, int], ...]:
    """(layer, output shape, parameter count) rows."""
    return (
        ("conv1", f"{CONV1_SIDE}x{CONV1_SIDE}", KERNEL * KERNEL + 1),
        ("conv2", f"{CONV2_SIDE}x{CONV2_SIDE}", KERNEL * KERNEL + 1),
        ("pool", f"{POOL_SIDE}x{POOL_SIDE}", 0),
        ("flatten", f"{POOL_SIDE * POOL_SIDE}", 0),
        ("dense1", f"{HIDDEN}", POOL_SIDE * POOL_SIDE * HIDDEN + HIDDEN),
        ("dense2", f"{NUM_CLASSES}", HIDDEN * NUM_CLASSES + NUM_CLASSES),
    )


def build_baseline(seed: int, init_scale: float = 0.1, pooling: PoolKind = "average") -> BaselineModel:
    """All 188 parameters uniform on [-init_scale, init_scale]."""
    rng = np.random.default_rng(seed)
    return BaselineModel(rng.uniform(-init_scale, init_scale, size=NUM_PARAMETERS), pooling)


def baseline_digest(model: BaselineModel) -> str:
    """Structure fingerprint stored in checkpoints."""
    rows = ";".join(f"{name}={shape}:{count}" for name, shape, count in layer_table())
    text = f"baseline|{rows}|pool={model.pooling}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class ForwardCache:
    """Intermediates kept by baseline_forward for the backward pass."""
    windows1: np.ndarray
    z1: np.ndarray
    h1: np.ndarray
    windows2: np.ndarray
    z2: np.ndarray
    h2: np.ndarray
    flat: np.ndarray
    z3: np.ndarray
    h3: np.ndarray
    pool_argmax: np.ndarray


def _pool_windows(h2: np.ndarray) -> np.ndarray:
    """(6, 6, 4) array of the 2x2 pooling windows."""
    return h2.reshape(POOL_SIDE, 2, POOL_SIDE, 2).transpose(0, 2, 1, 3).reshape(POOL_SIDE, POOL_SIDE, 4)


def _check_input(img28) -> np.ndarray:
    x = np.asarray(img28, dtype=np.float64)
    if x.shape != (INPUT_SIDE, INPUT_SIDE):
        raise InvalidInputError(f"baseline expects a {INPUT_SIDE}x{INPUT_SIDE} input, got {x.shape}")
    return x


def _conv1(p: Dict[str, np.ndarray], x: np.ndarray):
    padded = np.pad(x, ((0, 1), (0, 1)))
    windows = sliding_window_view(padded, (KERNEL, KERNEL))[::2, ::2]
    return np.einsum("ijab,ab->ij", windows, p["conv1_kernel"]) + p["conv1_bias"], windows


def baseline_forward(model: BaselineModel, img28, return_cache: bool = False):
    """
    Logits for one 28x28 image (pixels already scaled to [0, 1]).

    Raises:
        InvalidInputError: input is not 28x28
    """
    p = model.unpack()
    x = _check_input(img28)

    z1, windows1 = _conv1(p, x)
    h1 = np.maximum(z1, 0.0)
    windows2 = sliding_window_view(h1, (KERNEL, KERNEL))
    z2 = np.einsum("ijab,ab->ij", windows2, p["conv2_kernel"]) + p["conv2_bias"]
    h2 = np.maximum(z2, 0.0)

    pooled = _pool_windows(h2)
    if model.pooling == "max":
        pool_argmax = np.argmax(pooled, axis=-1)
        pool = np.take_along_axis(pooled, pool_argmax[..., None], axis=-1)[..., 0]
    else:
        pool_argmax = np.zeros((POOL_SIDE, POOL_SIDE), dtype=np.int64)
        pool = pooled.mean(axis=-1)

    flat = pool.reshape(-1)
    z3 = flat @ p["dense1_weight"] + p["dense1_bias"]
    h3 = np.maximum(z3, 0.0)
    logits = h3 @ p["dense2_weight"] + p["dense2_bias"]

    if not return_cache:
        return logits
    return logits, ForwardCache(windows1, z1, h1, windows2, z2, h2, flat, z3, h3, pool_argmax)


def baseline_backward(model: BaselineModel, cache: ForwardCache, dL_dlogits) -> np.ndarray:
    """Flat gradient of the loss with respect to every parameter."""
    p = model.unpack()
    dlogits = np.asarray(dL_dlogits, dtype=np.float64)
    grads: Dict[str, np.ndarray] = {}

    grads["dense2_weight"] = np.outer(cache.h3, dlogits)
    grads["dense2_bias"] = dlogits
    dz3 = (p["dense2_weight"] @ dlogits) * (cache.z3 > 0)
    grads["dense1_weight"] = np.outer(cache.flat, dz3)
    grads["dense1_bias"] = dz3
    dpool = (p["dense1_weight"] @ dz3).reshape(POOL_SIDE, POOL_SIDE)

    if model.pooling == "max":
        dwindows = np.zeros((POOL_SIDE, POOL_SIDE, 4))
        np.put_along_axis(dwindows, cache.pool_argmax[..., None], dpool[..., None], axis=-1)
    else:
        dwindows = np.repeat(dpool[..., None] / 4.0, 4, axis=-1)
    dh2 = dwindows.reshape(POOL_SIDE, POOL_SIDE, 2, 2).transpose(0, 2, 1, 3).reshape(CONV2_SIDE, CONV2_SIDE)

    dz2 = dh2 * (cache.z2 > 0)
    grads["conv2_kernel"] = np.einsum("ijab,ij->ab", cache.windows2, dz2)
    grads["conv2_bias"] = np.array(dz2.sum())
    dh1 = np.zeros((CONV1_SIDE, CONV1_SIDE))
    for a in range(KERNEL):
        for b in range(KERNEL):
            dh1[a:a + CONV2_SIDE, b:b + CONV2_SIDE] += p["conv2_kernel"][a, b] * dz2

    dz1 = dh1 * (cache.z1 > 0)
    grads["conv1_kernel"] = np.einsum("ijab,ij->ab", cache.windows1, dz1)
    grads["conv1_bias"] = np.array(dz1.sum())
    return pack_parameters(grads)
