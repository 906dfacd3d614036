"""
Gate Decomposition
Lowers controlled and doubly-controlled rotations to {RX, RY, RZ, CNOT, X}.

A rotation whose angle depends on the control pattern p (a uniformly
controlled rotation) is realized as a Gray-code cascade: target rotations
R(alpha_j) alternating with CNOTs whose control is the bit that changes
between consecutive Gray codes. Pattern angles theta and cascade angles alpha
are related by alpha = M theta with M_jk = 2^-c (-1)^(g_j . b_k).
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.simulator.statevector import TARGET_AXIS, GateKind, GateOp
from src.utils.errors import ConfigurationError, InvalidInputError

ROTATION_KINDS = {"X": GateKind.RX, "Y": GateKind.RY, "Z": GateKind.RZ}

# RX(theta) = RZ(-pi/2) RY(theta) RZ(pi/2)
X_FRAME_ANGLE = np.pi / 2


@dataclass(frozen=True)
class PatternAngles:
    """Rotation angle per control bit-pattern; index k has the first control as MSB."""
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        size = theta.shape[0]
        if size < 2 or size & (size - 1):
            raise InvalidInputError(f"pattern angles need 2^c entries, got {size}")
        object.__setattr__(self, "theta", theta)

    @property
    def num_controls(self) -> int:
        return self.theta.shape[0].bit_length() - 1


@dataclass(frozen=True)
class CascadePlan:
    """
    Cascade angles and the control feeding each CNOT.

    cnot_controls holds qubit indices when a control list was supplied to
    angle_transform, otherwise positions in the control list.
    """
    alphas: np.ndarray
    cnot_controls: tuple


def gray_code(num_controls: int) -> List[int]:
    return [j ^ (j >> 1) for j in range(2 ** num_controls)]


def gray_control_positions(num_controls: int) -> List[int]:
    """Control position (0 = first control) flipped after each cascade rotation."""
    codes = gray_code(num_controls)
    positions = []
    for j, code in enumerate(codes):
        changed = code ^ codes[(j + 1) % len(codes)]
        positions.append(num_controls - changed.bit_length())
    return positions


def transform_matrix(num_controls: int) -> np.ndarray:
    """M with alpha = M theta."""
    codes = gray_code(num_controls)
    size = 2 ** num_controls
    matrix = np.empty((size, size), dtype=np.float64)
    for j, g in enumerate(codes):
        for k in range(size):
            matrix[j, k] = -1.0 if bin(g & k).count("1") % 2 else 1.0
    return matrix / size


def angle_transform(theta: PatternAngles, controls: Optional[Sequence[int]] = None) -> CascadePlan:
    """
    Convert pattern angles to cascade angles.

    Args:
        theta: Pattern angles for 1 or 2 controls
        controls: Optional control qubit indices used to label the CNOTs

    Raises:
        ConfigurationError: more than 2 controls
    """
    c = theta.num_controls
    if c not in (1, 2):
        raise ConfigurationError(f"only 1 or 2 controls are supported, got {c}")
    if controls is not None and len(controls) != c:
        raise InvalidInputError(f"expected {c} control qubits, got {len(controls)}")
    alphas = transform_matrix(c) @ theta.theta
    positions = gray_control_positions(c)
    labels = tuple(controls[p] for p in positions) if controls is not None else tuple(positions)
    return CascadePlan(alphas=alphas, cnot_controls=labels)


@dataclass(frozen=True)
class LoweredStep:
    """
    One gate of a lowering.

    Rotations with a coefficient take `coefficient * angle` of the gate being
    lowered; everything else (CNOTs, X flips, framing RZs) is used as is.
    """
    gate: GateOp
    coefficient: Optional[float] = None

    def bind(self, angle: float) -> GateOp:
        if self.coefficient is None:
            return self.gate
        return self.gate.with_angle(self.coefficient * angle)


def cascade_steps(axis: str, coefficients: Sequence[float], cnot_controls: Sequence[int],
                  target: int) -> List[LoweredStep]:
    """Rotation/CNOT cascade for axis Y or Z (both anticommute with X)."""
    if axis not in ("Y", "Z"):
        raise InvalidInputError(f"cascade axis must be Y or Z, got {axis}")
    kind = ROTATION_KINDS[axis]
    steps: List[LoweredStep] = []
    for coefficient, control in zip(coefficients, cnot_controls):
        steps.append(LoweredStep(GateOp(kind, target), float(coefficient)))
        steps.append(LoweredStep(GateOp(GateKind.CNOT, target, ((control, 1),))))
    return steps


def x_frame(target: int, steps: List[LoweredStep]) -> List[LoweredStep]:
    """Conjugate a Y cascade into an X cascade."""
    return [
        LoweredStep(GateOp(GateKind.RZ, target, angle=X_FRAME_ANGLE)),
        *steps,
        LoweredStep(GateOp(GateKind.RZ, target, angle=-X_FRAME_ANGLE)),
    ]


def polarity_wrap(controls: Sequence[tuple], steps: List[LoweredStep]) -> List[LoweredStep]:
    """Surround `steps` with X on every polarity-0 control."""
    flips = [LoweredStep(GateOp(GateKind.X, q)) for q, polarity in controls if polarity == 0]
    return [*flips, *steps, *flips]


def pattern_rotation_steps(axis: str, weights: Sequence[float], controls: Sequence[int],
                           target: int) -> List[LoweredStep]:
    """
    Cascade rotating `target` by weights[p] * angle under control pattern p.

    Raises:
        InvalidInputError: repeated qubits, unknown axis
        ConfigurationError: more than 2 controls
    """
    if target in controls or len(set(controls)) != len(controls):
        raise InvalidInputError(f"repeated qubit among controls {list(controls)} and target {target}")
    if axis not in ROTATION_KINDS:
        raise InvalidInputError(f"unknown rotation axis {axis}")
    plan = angle_transform(PatternAngles(np.asarray(weights, dtype=np.float64)), controls)
    if axis == "X":
        return x_frame(target, cascade_steps("Y", plan.alphas, plan.cnot_controls, target))
    return cascade_steps(axis, plan.alphas, plan.cnot_controls, target)


def lower_gate(gate: GateOp) -> List[LoweredStep]:
    """
    Lowering of one controlled rotation.

    CRY/CRZ give [R(theta/2), CNOT, R(-theta/2), CNOT]; CRX is that Y
    pattern framed by RZ(pi/2) ... RZ(-pi/2); CCRY rotates only pattern 11
    once polarity-0 controls are flipped, so its cascade coefficients are
    the last column of M (+-1/4).

    Raises:
        InvalidInputError: gate kind has no lowering
    """
    axis = TARGET_AXIS[gate.kind]
    if gate.kind in (GateKind.CRX, GateKind.CRY, GateKind.CRZ):
        (control, _), = gate.controls
        steps = pattern_rotation_steps(axis, [0.0, 1.0], [control], gate.target)
    elif gate.kind == GateKind.CCRY:
        controls = [q for q, _ in gate.controls]
        steps = pattern_rotation_steps(axis, [0.0, 0.0, 0.0, 1.0], controls, gate.target)
    else:
        raise InvalidInputError(f"cannot lower gate kind {gate.kind}")
    return polarity_wrap(gate.controls, steps)


def bind_steps(steps: Sequence[LoweredStep], angle: float) -> List[GateOp]:
    return [step.bind(angle) for step in steps]


def lower_literal(gate: GateOp) -> List[GateOp]:
    """Lower a controlled rotation that carries a concrete angle."""
    if gate.angle is None:
        raise InvalidInputError(f"{gate.kind.value} has no angle to lower")
    return bind_steps(lower_gate(gate), gate.angle)


def uniformly_controlled_rotation(axis: str, theta: Sequence[float], controls: Sequence[int],
                                  target: int) -> List[GateOp]:
    """Rotation R_axis(theta[p]) on `target` for every control pattern p."""
    return bind_steps(pattern_rotation_steps(axis, theta, controls, target), 1.0)


def decompose_controlled_rotation(axis: str, theta: float, control: int, target: int,
                                  polarity: int = 1) -> List[GateOp]:
    """
    Single-controlled rotation as rotations and CNOTs.

    Raises:
        InvalidInputError: control == target or unknown axis
    """
    if axis not in ROTATION_KINDS:
        raise InvalidInputError(f"unknown rotation axis {axis}")
    kind = {"X": GateKind.CRX, "Y": GateKind.CRY, "Z": GateKind.CRZ}[axis]
    return lower_literal(GateOp(kind, target, ((control, polarity),), angle=float(theta)))


def ancilla_flip_gate(c1: int, c2: int, target: int, polarity1: int = 1, polarity2: int = 1) -> GateOp:
    """
    Native CC-RY(pi) flipping a |0> target when (c1, c2) == (polarity1, polarity2).

    Raises:
        InvalidInputError: repeated qubit indices or bad polarity
    """
    if len({c1, c2, target}) != 3:
        raise InvalidInputError(f"toffoli qubits must be distinct, got {(c1, c2, target)}")
    if polarity1 not in (0, 1) or polarity2 not in (0, 1):
        raise InvalidInputError("control polarity must be 0 or 1")
    return GateOp(GateKind.CCRY, target, ((c1, polarity1), (c2, polarity2)), angle=float(np.pi))


def ancilla_flip_toffoli(c1: int, c2: int, target: int, polarity1: int = 1, polarity2: int = 1) -> List[GateOp]:
    """
    Lowered ancilla flip.

    On target |0> inputs this matches the Toffoli exactly; on target |1> the
    controlled block maps |1> to -|0>. Applied twice it is CC-RY(2pi): the
    identity on populations, with a -1 sign on the matching-pattern columns.
    """
    return lower_literal(ancilla_flip_gate(c1, c2, target, polarity1, polarity2))
