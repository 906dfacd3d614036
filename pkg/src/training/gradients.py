"""
Forward Pass and Parameter-Shift Gradients

Logits are the exact P(1) of the readout ancillas. Gradients are taken on a
lowered circuit, where every parameterized op is a bare rotation
R_A(c * theta_k + b). For such an op the shift rule is exact:

    d<H>/d(angle) = (<H>(angle + pi/2) - <H>(angle - pi/2)) / 2

and the chain rule adds c times that to grad[k] once per occurrence.

Two evaluations of the same sum are provided:
    "shifted"  simulates the two shifted circuits for every occurrence
    "sweep"    obtains every shift difference from one forward and one
               backward pass: (<H>(+) - <H>(-)) / 2 = Im <lambda| A |psi>,
               with psi the state after the op and lambda = U_after^T H U_after psi
"""

from functools import lru_cache
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from src.circuits.ir import ParamCircuit, bare_rotation_axis, bind_parameters, lower
from src.data.encoding import EncodedImage, amplitude_encode
from src.simulator.statevector import (
    StateVector,
    apply_gate,
    apply_pauli,
    new_state,
    probability_one,
    run_circuit,
)
from src.training.losses import softmax_cross_entropy
from src.utils.errors import InvalidInputError

SHIFT = np.pi / 2
FD_STEP = 1e-4

GradientMethod = Literal["sweep", "shifted"]


def initial_state(circuit: ParamCircuit, img: Optional[EncodedImage]) -> StateVector:
    """Encoded image on the data register, or |0...0> when img is None."""
    if img is None:
        return new_state(circuit.num_qubits)
    return amplitude_encode(img, circuit.num_qubits)


def readout_logits(circuit: ParamCircuit, state: StateVector) -> np.ndarray:
    return np.array([probability_one(state, a) for a in circuit.readout], dtype=np.float64)


def simulate(circuit: ParamCircuit, theta, img: Optional[EncodedImage]) -> StateVector:
    """Final state of the circuit bound to theta."""
    return run_circuit(initial_state(circuit, img), bind_parameters(circuit, theta))


def forward(circuit: ParamCircuit, theta, img: Optional[EncodedImage]) -> np.ndarray:
    """
    Readout logits (P(a_i = 1) for each readout ancilla, class order).

    Raises:
        InvalidInputError: theta length differs from the circuit's parameter count
    """
    return readout_logits(circuit, simulate(circuit, theta, img))


def loss_at(circuit: ParamCircuit, theta, img: EncodedImage) -> float:
    loss, _ = softmax_cross_entropy(forward(circuit, theta, img), img.label)
    return loss


@lru_cache(maxsize=64)
def _qubit_mask(num_qubits: int, qubit: int) -> np.ndarray:
    """1.0 where `qubit` is set in the basis index, else 0.0."""
    indices = np.arange(2 ** num_qubits)
    return ((indices >> (num_qubits - 1 - qubit)) & 1).astype(np.float64)


def _observable_diagonal(circuit: ParamCircuit, weights: np.ndarray) -> np.ndarray:
    """Diagonal of H = sum_i w_i P1(readout_i)."""
    diag = np.zeros(2 ** circuit.num_qubits, dtype=np.float64)
    for w, qubit in zip(weights, circuit.readout):
        diag += w * _qubit_mask(circuit.num_qubits, qubit)
    return diag


def _weighted_readout(circuit: ParamCircuit, state: StateVector, weights: np.ndarray) -> float:
    probs = np.abs(state.amps) ** 2
    return float(np.dot(probs, _observable_diagonal(circuit, weights)))


def _check_lowered(circuit: ParamCircuit) -> None:
    if not circuit.is_lowered:
        raise InvalidInputError(
            f"circuit '{circuit.name}' has controlled rotations; lower() it before differentiating"
        )


def _sweep(circuit: ParamCircuit, theta: np.ndarray, img: Optional[EncodedImage],
           weights: np.ndarray) -> np.ndarray:
    gates = bind_parameters(circuit, theta)
    psi = run_circuit(initial_state(circuit, img), gates)
    lam = StateVector(psi.num_qubits, psi.amps * _observable_diagonal(circuit, weights))

    grad = np.zeros(circuit.num_params, dtype=np.float64)
    for op, gate in zip(reversed(circuit.ops), reversed(gates)):
        if op.ref is not None:
            generated = apply_pauli(psi.copy(), bare_rotation_axis(gate), gate.target)
            grad[op.ref.param_index] += op.ref.coefficient * float(np.vdot(lam.amps, generated.amps).imag)
        undo = gate.inverse()
        apply_gate(psi, undo)
        apply_gate(lam, undo)
    return grad


def _shifted(circuit: ParamCircuit, theta: np.ndarray, img: Optional[EncodedImage],
             weights: np.ndarray, shift: float) -> np.ndarray:
    gates = bind_parameters(circuit, theta)
    grad = np.zeros(circuit.num_params, dtype=np.float64)
    prefix = initial_state(circuit, img)
    for j, (op, gate) in enumerate(zip(circuit.ops, gates)):
        if op.ref is not None:
            values = []
            for sign in (1.0, -1.0):
                state = apply_gate(prefix.copy(), gate.with_angle(gate.angle + sign * shift))
                run_circuit(state, gates[j + 1:])
                values.append(_weighted_readout(circuit, state, weights))
            grad[op.ref.param_index] += op.ref.coefficient * (values[0] - values[1]) / 2.0
        apply_gate(prefix, gate)
    return grad


def parameter_shift_gradient(circuit: ParamCircuit, theta, img: Optional[EncodedImage],
                             dL_dlogits, method: GradientMethod = "sweep",
                             shift: float = SHIFT) -> np.ndarray:
    """
    dL/dtheta = sum_i dL/dlogit_i * dlogit_i/dtheta by the parameter-shift rule.

    Args:
        circuit: Lowered circuit
        theta: Parameter vector
        img: Encoded image (None starts from |0...0>)
        dL_dlogits: Loss gradient with respect to the readout logits
        method: "sweep" (one forward and one backward pass) or "shifted"
            (two shifted simulations per parameter occurrence)
        shift: Shift used by "shifted"; the rule is exact only at pi/2

    Raises:
        InvalidInputError: circuit not lowered, wrong theta or weight length
    """
    _check_lowered(circuit)
    theta = np.asarray(theta, dtype=np.float64)
    weights = np.asarray(dL_dlogits, dtype=np.float64).reshape(-1)
    if weights.shape != (len(circuit.readout),):
        raise InvalidInputError(f"expected {len(circuit.readout)} logit weights, got {weights.shape[0]}")
    if method == "sweep":
        if theta.shape != (circuit.num_params,):
            raise InvalidInputError(f"theta has shape {theta.shape}, expected ({circuit.num_params},)")
        return _sweep(circuit, theta, img, weights)
    if method == "shifted":
        return _shifted(circuit, theta, img, weights, shift)
    raise InvalidInputError(f"unknown gradient method '{method}'")


def sample_loss_and_gradient(circuit: ParamCircuit, theta, img: EncodedImage,
                             method: GradientMethod = "sweep") -> Tuple[float, np.ndarray, np.ndarray]:
    """(loss, logits, dL/dtheta) for one labelled image on a lowered circuit."""
    logits = forward(circuit, theta, img)
    loss, dl_dlogits = softmax_cross_entropy(logits, img.label)
    grad = parameter_shift_gradient(circuit, theta, img, dl_dlogits, method)
    return loss, logits, grad


def finite_difference_gradient(circuit: ParamCircuit, theta, img: EncodedImage,
                               step: float = FD_STEP) -> np.ndarray:
    """Central-difference dL/dtheta; works on native or lowered circuits."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.zeros_like(theta)
    for k in range(theta.shape[0]):
        plus = theta.copy()
        minus = theta.copy()
        plus[k] += step
        minus[k] -= step
        grad[k] = (loss_at(circuit, plus, img) - loss_at(circuit, minus, img)) / (2.0 * step)
    return grad


def gradient_check(circuit: ParamCircuit, samples: Sequence[Tuple[np.ndarray, EncodedImage]],
                   method: GradientMethod = "sweep", shift: float = SHIFT,
                   step: float = FD_STEP) -> List[float]:
    """
    Max |parameter-shift - finite-difference| per sample.

    The shift gradient runs on the lowered circuit while the finite
    differences run on `circuit` as given, so the two share no code path
    beyond the simulator.
    """
    lowered = circuit if circuit.is_lowered else lower(circuit)
    deviations = []
    for theta, img in samples:
        logits = forward(lowered, theta, img)
        _, dl_dlogits = softmax_cross_entropy(logits, img.label)
        shifted = parameter_shift_gradient(lowered, theta, img, dl_dlogits, method, shift)
        reference = finite_difference_gradient(circuit, theta, img, step)
        deviations.append(float(np.max(np.abs(shifted - reference))))
    return deviations


def score_logits(dataset: Sequence, logits: Sequence[np.ndarray]) -> Tuple[float, np.ndarray]:
    """
    Accuracy and 4x4 confusion matrix (rows = true class, cols = predicted).
    Predictions take the argmax, ties resolved toward the lowest index.

    Raises:
        InvalidInputError: empty dataset
    """
    if not dataset:
        raise InvalidInputError("cannot evaluate on an empty dataset")
    confusion = np.zeros((4, 4), dtype=np.int64)
    for img, row in zip(dataset, logits):
        confusion[img.label, int(np.argmax(row))] += 1
    return float(np.trace(confusion)) / len(dataset), confusion


def evaluate(circuit: ParamCircuit, theta, dataset: Sequence[EncodedImage]) -> Tuple[float, np.ndarray]:
    """Accuracy and confusion matrix of the circuit bound to theta."""
    if not dataset:
        raise InvalidInputError("cannot evaluate on an empty dataset")
    return score_logits(dataset, [forward(circuit, theta, img) for img in dataset])
