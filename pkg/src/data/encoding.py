"""
Amplitude Encoding
Packs a normalized 256-pixel image into the 8-qubit data register by direct
statevector initialization: |psi_k> = sum_m C_m^k |m>, m = 0..255.
"""

from dataclasses import dataclass

import numpy as np

from src.simulator.statevector import MAX_QUBITS, StateVector
from src.utils.errors import ConfigurationError, DegenerateInputError, InvalidInputError

IMAGE_SIZE = 256
DATA_QUBITS = 8
UNIT_NORM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EncodedImage:
    """Normalized flattened image with its remapped class label."""
    coeffs: np.ndarray
    label: int
    source_id: int = -1

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64).reshape(-1)
        if coeffs.shape != (IMAGE_SIZE,):
            raise InvalidInputError(f"expected {IMAGE_SIZE} coefficients, got {coeffs.shape[0]}")
        if np.any(coeffs < 0):
            raise InvalidInputError("coefficients must be nonnegative")
        if abs(float(np.sum(coeffs ** 2)) - 1.0) > UNIT_NORM_TOLERANCE:
            raise InvalidInputError("coefficients must have unit L2 norm")
        if not 0 <= int(self.label) <= 3:
            raise InvalidInputError(f"label must be in 0..3, got {self.label}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "label", int(self.label))


def normalize_vector(pixels) -> np.ndarray:
    """
    Scale 256 nonnegative pixels to unit L2 norm.

    Raises:
        DegenerateInputError: all pixels are zero
        InvalidInputError: wrong size or negative pixels
    """
    pixels = np.asarray(pixels, dtype=np.float64).reshape(-1)
    if pixels.shape != (IMAGE_SIZE,):
        raise InvalidInputError(f"expected {IMAGE_SIZE} pixels, got {pixels.shape[0]}")
    if np.any(pixels < 0):
        raise InvalidInputError("pixels must be nonnegative")
    norm = np.linalg.norm(pixels)
    if norm == 0:
        raise DegenerateInputError("cannot normalize an all-zero image")
    return pixels / norm


def amplitude_encode(img: EncodedImage, total_qubits: int) -> StateVector:
    """
    State with the data register holding `img.coeffs` and every other wire in |0>.

    Data qubits 0..7 are the most significant bits, so coefficient m lands on
    basis index m << (total_qubits - 8).
    """
    if not DATA_QUBITS <= total_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"total_qubits must be in {DATA_QUBITS}..{MAX_QUBITS}, got {total_qubits}")
    amps = np.zeros(2 ** total_qubits, dtype=np.complex128)
    amps[np.arange(IMAGE_SIZE) << (total_qubits - DATA_QUBITS)] = img.coeffs
    return StateVector(total_qubits, amps)
