"""
Parameterized Circuit IR
Ordered gate templates whose angles reference a shared parameter table.

A parameterized op resolves to angle = coefficient * theta[param_index] + offset.
"""

import hashlib
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.simulator.decomposition import LoweredStep, lower_gate
from src.simulator.statevector import BARE_ROTATIONS, FIXED_KINDS, TARGET_AXIS, GateKind, GateOp
from src.utils.errors import InvalidInputError

LOWERED_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CNOT, GateKind.X})


@dataclass(frozen=True)
class ParamRef:
    """angle = coefficient * theta[param_index] + offset"""
    param_index: int
    coefficient: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.coefficient == 0:
            raise InvalidInputError("ParamRef coefficient must be nonzero")
        if self.param_index < 0:
            raise InvalidInputError(f"negative parameter index {self.param_index}")

    def resolve(self, theta: np.ndarray) -> float:
        return self.coefficient * float(theta[self.param_index]) + self.offset

    def scaled(self, factor: float) -> "ParamRef":
        return ParamRef(self.param_index, self.coefficient * factor, self.offset * factor)


@dataclass(frozen=True)
class ParamOp:
    """Gate template plus its optional parameter reference and stage tag."""
    gate: GateOp
    ref: Optional[ParamRef] = None
    tag: str = ""

    def __post_init__(self):
        if self.ref is not None and self.gate.kind in FIXED_KINDS:
            raise InvalidInputError(f"{self.gate.kind.value} cannot carry a parameter")
        if self.ref is None and self.gate.is_parameterizable and self.gate.angle is None:
            raise InvalidInputError(f"{self.gate.kind.value} needs a literal angle or a parameter")

    def bind(self, theta: np.ndarray) -> GateOp:
        if self.ref is None:
            return self.gate
        return self.gate.with_angle(self.ref.resolve(theta))


@dataclass(frozen=True)
class ParamCircuit:
    """
    Immutable parameterized circuit.

    Attributes:
        num_qubits: Wire count
        ops: Ordered gate templates
        num_params: Length of the parameter vector
        data_qubits: Amplitude-encoded register
        ancilla_qubits: Readout ancillas
        readout: Ancillas whose P(1) form the logits, in class order
        virtual_qubit: Wire fixed to |0> used by the 3-qubit filters (or None)
        name: Architecture label ("full", "reference", ...)
        param_labels: Human-readable name per parameter
        config: Architecture settings the circuit was built from
    """
    num_qubits: int
    ops: Tuple[ParamOp, ...]
    num_params: int
    data_qubits: Tuple[int, ...]
    ancilla_qubits: Tuple[int, ...]
    readout: Tuple[int, ...]
    virtual_qubit: Optional[int] = None
    name: str = "custom"
    param_labels: Tuple[str, ...] = ()
    config: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        referenced = set()
        for op in self.ops:
            for q in op.gate.qubits:
                if q >= self.num_qubits:
                    raise InvalidInputError(f"op {op.gate.kind.value} touches qubit {q} >= {self.num_qubits}")
            if op.ref is not None:
                if op.ref.param_index >= self.num_params:
                    raise InvalidInputError(
                        f"parameter index {op.ref.param_index} >= num_params {self.num_params}"
                    )
                referenced.add(op.ref.param_index)
        if self.param_labels and len(self.param_labels) != self.num_params:
            raise InvalidInputError(f"{len(self.param_labels)} parameter labels for {self.num_params} parameters")
        unused = sorted(set(range(self.num_params)) - referenced)
        if unused:
            raise InvalidInputError(f"parameters never referenced: {unused}")
        readout_set = set(self.readout)
        for op in self.ops:
            if readout_set.intersection(op.gate.qubits) and op.tag not in ("cascade", "readout"):
                raise InvalidInputError(f"readout ancilla touched by stage '{op.tag}' before the readout")

    @property
    def is_lowered(self) -> bool:
        return all(op.gate.kind in LOWERED_KINDS for op in self.ops)

    @property
    def arch_digest(self) -> str:
        return circuit_digest(self)

    def ops_tagged(self, prefix: str) -> List[ParamOp]:
        return [op for op in self.ops if op.tag.startswith(prefix)]


def bind_parameters(circuit: ParamCircuit, theta: Sequence[float]) -> List[GateOp]:
    """
    Resolve every template to a concrete gate, order preserved.

    Raises:
        InvalidInputError: theta length differs from num_params
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (circuit.num_params,):
        raise InvalidInputError(f"theta has shape {theta.shape}, expected ({circuit.num_params},)")
    return [op.bind(theta) for op in circuit.ops]


def parameter_count(circuit: ParamCircuit) -> int:
    return circuit.num_params


def _lowered_op(step: LoweredStep, op: ParamOp) -> ParamOp:
    if step.coefficient is None:
        return ParamOp(step.gate, None, op.tag)
    if op.ref is None:
        return ParamOp(step.bind(op.gate.angle), None, op.tag)
    return ParamOp(step.gate, op.ref.scaled(step.coefficient), op.tag)


def lower(circuit: ParamCircuit) -> ParamCircuit:
    """
    Rewrite every controlled rotation into {RX, RY, RZ, CNOT, X}.

    Each cascade rotation takes its source angle scaled by the step
    coefficient, so parameter references become ParamRef.scaled copies
    (+-1/2 for single controls, +-1/4 for CCRY).

    Raises:
        InvalidInputError: unsupported gate kind
    """
    lowered: List[ParamOp] = []
    for op in circuit.ops:
        if op.gate.kind in LOWERED_KINDS:
            lowered.append(op)
        else:
            lowered.extend(_lowered_op(step, op) for step in lower_gate(op.gate))
    return replace(circuit, ops=tuple(lowered))


def _format_float(value: float) -> str:
    return repr(float(value))


def dump_circuit(circuit: ParamCircuit) -> str:
    """
    Plain-text listing: header lines (wire roles, one `# param <index> <label>`
    per labelled parameter), then one op per line:
        <index> <tag> <kind> t=<target> c=<q:pol,...> p=<index>*<coef>+<offset> | a=<angle>
    """
    lines = [
        f"# circuit {circuit.name}",
        f"# qubits {circuit.num_qubits}",
        f"# parameters {circuit.num_params}",
        f"# data {','.join(map(str, circuit.data_qubits))}",
        f"# virtual {'' if circuit.virtual_qubit is None else circuit.virtual_qubit}",
        f"# ancillas {','.join(map(str, circuit.ancilla_qubits))}",
        f"# readout {','.join(map(str, circuit.readout))}",
    ]
    lines.extend(f"# param {i} {label}" for i, label in enumerate(circuit.param_labels))
    for i, op in enumerate(circuit.ops):
        gate = op.gate
        controls = ",".join(f"{q}:{p}" for q, p in gate.controls) or "-"
        if op.ref is not None:
            angle = f"p={op.ref.param_index}*{_format_float(op.ref.coefficient)}+{_format_float(op.ref.offset)}"
        elif gate.angle is not None:
            angle = f"a={_format_float(gate.angle)}"
        else:
            angle = "-"
        lines.append(f"{i:04d} {op.tag or '-'} {gate.kind.value} t={gate.target} c={controls} {angle}")
    return "\n".join(lines) + "\n"


def circuit_digest(circuit: ParamCircuit) -> str:
    """sha256 of the canonical dump."""
    return hashlib.sha256(dump_circuit(circuit).encode("utf-8")).hexdigest()


def bare_rotation_axis(gate: GateOp) -> str:
    """Pauli generator axis of a bare rotation."""
    if gate.kind not in BARE_ROTATIONS:
        raise InvalidInputError(f"{gate.kind.value} is not a bare rotation")
    return TARGET_AXIS[gate.kind]

