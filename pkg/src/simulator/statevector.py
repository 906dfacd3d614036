"""
Statevector Simulator
Exact dense simulation of up to 13 qubits.

Conventions used across the whole project:
  - basis index m has qubit 0 as its most significant bit,
    m = sum_i b_i * 2^(n-1-i)
  - rotations are R_A(theta) = exp(-i theta A / 2) for A in {X, Y, Z}
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import ConfigurationError, InvalidInputError, OracleScaleError

MAX_QUBITS = 13
MAX_ORACLE_QUBITS = 6
NORM_TOLERANCE = 1e-9


class GateKind(str, Enum):
    """Primitive gate kinds understood by the simulator."""
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    CRX = "CRX"
    CRY = "CRY"
    CRZ = "CRZ"
    CCRY = "CCRY"
    X = "X"


# Number of controls each kind carries
CONTROL_COUNT = {
    GateKind.RX: 0, GateKind.RY: 0, GateKind.RZ: 0, GateKind.X: 0,
    GateKind.CNOT: 1, GateKind.CRX: 1, GateKind.CRY: 1, GateKind.CRZ: 1,
    GateKind.CCRY: 2,
}

# Rotation axis acting on the target ("X" for the fixed flips)
TARGET_AXIS = {
    GateKind.RX: "X", GateKind.CRX: "X",
    GateKind.RY: "Y", GateKind.CRY: "Y", GateKind.CCRY: "Y",
    GateKind.RZ: "Z", GateKind.CRZ: "Z",
    GateKind.X: "X", GateKind.CNOT: "X",
}

FIXED_KINDS = frozenset({GateKind.X, GateKind.CNOT})
BARE_ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})

PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class GateOp:
    """
    One primitive gate instance.

    Attributes:
        kind: Gate kind
        target: Target qubit index
        controls: Tuple of (qubit index, polarity) pairs; the gate acts only
            where every control qubit equals its polarity
        angle: Rotation angle in radians (None for X and CNOT)
    """
    kind: GateKind
    target: int
    controls: Tuple[Tuple[int, int], ...] = ()
    angle: Optional[float] = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "controls", tuple((int(q), int(p)) for q, p in self.controls))

        if len(self.controls) != CONTROL_COUNT[kind]:
            raise InvalidInputError(
                f"{kind.value} expects {CONTROL_COUNT[kind]} control(s), got {len(self.controls)}"
            )
        qubits = [q for q, _ in self.controls]
        if self.target in qubits:
            raise InvalidInputError(f"{kind.value}: target {self.target} is also a control")
        if len(set(qubits)) != len(qubits):
            raise InvalidInputError(f"{kind.value}: repeated control qubit in {qubits}")
        if any(p not in (0, 1) for _, p in self.controls):
            raise InvalidInputError(f"{kind.value}: control polarity must be 0 or 1")
        if min([self.target, *qubits]) < 0:
            raise InvalidInputError(f"{kind.value}: negative qubit index")
        if kind in FIXED_KINDS and self.angle is not None:
            raise InvalidInputError(f"{kind.value} takes no angle")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (*[q for q, _ in self.controls], self.target)

    @property
    def is_parameterizable(self) -> bool:
        return self.kind not in FIXED_KINDS

    def with_angle(self, angle: float) -> "GateOp":
        return replace(self, angle=float(angle))

    def inverse(self) -> "GateOp":
        if self.kind in FIXED_KINDS:
            return self
        return replace(self, angle=-self.angle)


def target_matrix(kind: GateKind, angle: Optional[float]) -> np.ndarray:
    """2x2 matrix applied to the target where the controls are satisfied."""
    axis = TARGET_AXIS[kind]
    if kind in FIXED_KINDS:
        return PAULI["X"]
    if angle is None:
        raise InvalidInputError(f"{kind.value} requires an angle")
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if axis == "Y":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=np.complex128)


@dataclass
class StateVector:
    """
    Dense amplitude array over num_qubits qubits.

    A StateVector is mutated in place by apply_gate; use copy() before
    handing one to another worker.
    """
    num_qubits: int
    amps: np.ndarray = field(repr=False)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def tensor(self) -> np.ndarray:
        """View of the amplitudes with one axis per qubit (axis i = qubit i)."""
        return self.amps.reshape((2,) * self.num_qubits)


def _check_qubit_count(num_qubits: int) -> None:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")


def new_state(num_qubits: int) -> StateVector:
    """Return |0...0> on num_qubits qubits."""
    _check_qubit_count(num_qubits)
    amps = np.zeros(2 ** num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def init_amplitudes(vec: Sequence[complex]) -> StateVector:
    """
    Build a state whose amplitudes equal `vec` exactly.

    Raises:
        InvalidInputError: length is not a power of two or the norm is not 1
    """
    amps = np.array(vec, dtype=np.complex128).reshape(-1)
    size = amps.shape[0]
    if size < 2 or size & (size - 1):
        raise InvalidInputError(f"amplitude vector length must be a power of two >= 2, got {size}")
    num_qubits = size.bit_length() - 1
    if num_qubits > MAX_QUBITS:
        raise InvalidInputError(f"amplitude vector spans {num_qubits} qubits (max {MAX_QUBITS})")
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise InvalidInputError(f"amplitude vector must have unit L2 norm, got {norm:.12f}")
    return StateVector(num_qubits, amps)


def _check_indices(state: StateVector, op: GateOp) -> None:
    for q in op.qubits:
        if q >= state.num_qubits:
            raise InvalidInputError(
                f"{op.kind.value}: qubit {q} out of range for {state.num_qubits}-qubit state"
            )


def _pair_views(state: StateVector, target: int, controls: Iterable[Tuple[int, int]]):
    """Index tuples selecting the target-0 and target-1 halves of the controlled subspace."""
    idx = [slice(None)] * state.num_qubits
    for q, polarity in controls:
        idx[q] = polarity
    idx0 = list(idx)
    idx1 = list(idx)
    idx0[target] = 0
    idx1[target] = 1
    return tuple(idx0), tuple(idx1)


def apply_matrix(state: StateVector, matrix: np.ndarray, target: int,
                 controls: Iterable[Tuple[int, int]] = ()) -> StateVector:
    """Apply a 2x2 matrix to `target` inside the subspace selected by `controls`."""
    psi = state.tensor()
    idx0, idx1 = _pair_views(state, target, controls)
    a = psi[idx0]
    b = psi[idx1]
    new_a = matrix[0, 0] * a + matrix[0, 1] * b
    new_b = matrix[1, 0] * a + matrix[1, 1] * b
    psi[idx0] = new_a
    psi[idx1] = new_b
    return state


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """
    Multiply `state` in place by the unitary of `op`.

    Raises:
        InvalidInputError: a qubit index is outside the state
    """
    _check_indices(state, op)
    return apply_matrix(state, target_matrix(op.kind, op.angle), op.target, op.controls)


def apply_pauli(state: StateVector, axis: str, target: int) -> StateVector:
    """Apply the Pauli `axis` to `target` in place."""
    return apply_matrix(state, PAULI[axis], target)


def run_circuit(state: StateVector, ops: Iterable[GateOp]) -> StateVector:
    """Apply every op of a bound gate sequence in order."""
    for op in ops:
        apply_gate(state, op)
    return state


def probability_one(state: StateVector, qubit: int) -> float:
    """Exact marginal probability that `qubit` reads 1."""
    if not 0 <= qubit < state.num_qubits:
        raise InvalidInputError(f"qubit {qubit} out of range for {state.num_qubits}-qubit state")
    block = state.amps.reshape(2 ** qubit, 2, -1)[:, 1, :]
    return float(np.sum(block.real ** 2 + block.imag ** 2))


def unitary_of(ops: Sequence[GateOp], num_qubits: int) -> np.ndarray:
    """
    Dense unitary of a gate sequence; column k is the sequence applied to |k>.

    Raises:
        OracleScaleError: num_qubits > 6
    """
    if num_qubits > MAX_ORACLE_QUBITS:
        raise OracleScaleError(f"unitary_of is limited to {MAX_ORACLE_QUBITS} qubits, got {num_qubits}")
    _check_qubit_count(num_qubits)
    dim = 2 ** num_qubits
    unitary = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[k] = 1.0
        state = StateVector(num_qubits, amps)
        run_circuit(state, ops)
        unitary[:, k] = state.amps
    return unitary
