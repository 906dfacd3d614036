"""
QCNN Architectures
Builders for the full quantum convolutional classifier and the
CNOT-entangler reference circuit.

Wire layout (13 qubits):
    0..7   data register (amplitude encoded, qubit 0 = MSB of the pixel index)
    8      virtual wire, fixed |0>, used only by the 3-qubit filters
    9..12  readout ancillas a0..a3

Stage order of the full circuit:
    F4 (2 sublayers) -> F3 (2 sublayers) -> F2 (2 sublayers)
    -> conv + pooling (8 -> 4) -> regular layers -> pooling (4 -> 2)
    -> final filter -> output cascade (one-hot onto a0..a3)
"""

from typing import List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.circuits.ir import ParamCircuit, ParamOp, ParamRef
from src.simulator.decomposition import ancilla_flip_gate
from src.simulator.statevector import GateKind, GateOp

NUM_QUBITS = 13
DATA_QUBITS = tuple(range(8))
VIRTUAL_QUBIT = 8
ANCILLA_QUBITS = (9, 10, 11, 12)

# Sublayer placements; the second sublayer is shifted by two wires
F4_PLACEMENTS = (
    ((0, 1, 2, 3), (4, 5, 6, 7)),
    ((2, 3, 4, 5), (6, 7, 0, 1)),
)
V = VIRTUAL_QUBIT
# (filter qubits, next wire in scan order)
F3_PLACEMENTS = (
    (((0, 1, 2), 3), ((3, 4, 5), 6), ((6, 7, V), 0)),
    (((1, 2, 3), 4), ((4, 5, 6), 7), ((7, V, 0), 1)),
)
F2_PLACEMENTS = F4_PLACEMENTS

POOL1_PAIRS = ((0, 1), (2, 3), (4, 5), (6, 7))  # (dropped, kept)
POOL1_KEPT = (1, 3, 5, 7)
POOL2_PAIRS = ((1, 3), (5, 7))
FINAL_QUBITS = (3, 7)
CLASS_CODES = ((0, 0), (0, 1), (1, 0), (1, 1))


class ArchitectureConfig(BaseModel):
    """Switches of the QCNN builders."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_regular_layers: int = Field(default=8, ge=1)
    entangler: Literal["parameterized_cry", "cnot"] = "parameterized_cry"
    share_across_sublayers: bool = True
    include_final_filter: bool = True
    include_output_cascade: bool = True
    f3_entanglement: Literal[3, 4] = 4


class _ParamTable:
    """Allocates parameter indices and remembers their labels."""

    def __init__(self):
        self.labels: List[str] = []

    def new(self, label: str) -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def block(self, prefix: str, names: Sequence[str]) -> List[int]:
        return [self.new(f"{prefix}.{name}") for name in names]


class _Builder:
    def __init__(self, config: ArchitectureConfig):
        self.config = config
        self.params = _ParamTable()
        self.ops: List[ParamOp] = []

    # --- primitives ---

    def rotation(self, kind: GateKind, qubit: int, index: int, tag: str):
        self.ops.append(ParamOp(GateOp(kind, qubit), ParamRef(index), tag))

    def controlled(self, kind: GateKind, control: int, target: int, index: int, tag: str, polarity: int = 1):
        self.ops.append(ParamOp(GateOp(kind, target, ((control, polarity),)), ParamRef(index), tag))

    def cnot(self, control: int, target: int, tag: str):
        self.ops.append(ParamOp(GateOp(GateKind.CNOT, target, ((control, 1),)), None, tag))

    @property
    def parameterized_entangler(self) -> bool:
        return self.config.entangler == "parameterized_cry"

    def ring(self, links: Sequence[Tuple[int, int]], phis: Optional[Sequence[int]], tag: str):
        """CRY(phi) per link, or plain CNOTs when phis is None."""
        for i, (control, target) in enumerate(links):
            if phis is None:
                self.cnot(control, target, tag)
            else:
                self.controlled(GateKind.CRY, control, target, phis[i], tag)

    def sublayer_params(self, prefix: str, sublayer: int, names: Sequence[str], cache: dict) -> List[int]:
        """Shared block reused by both sublayers unless sharing is off."""
        key = prefix if self.config.share_across_sublayers else f"{prefix}.s{sublayer}"
        if key not in cache:
            cache[key] = self.params.block(key, names)
        return cache[key]

    # --- stages ---

    def four_qubit_layer(self, prefix: str):
        """F4 template: RY on 4 qubits, then a 4-link entangling ring."""
        cache: dict = {}
        for s, placements in enumerate(F4_PLACEMENTS, start=1):
            thetas = self.sublayer_params(f"{prefix}.theta", s, ["1", "2", "3", "4"], cache)
            phis = None
            if self.parameterized_entangler:
                phis = self.sublayer_params(f"{prefix}.phi", s, ["1", "2", "3", "4"], cache)
            tag = f"{prefix}.s{s}"
            for qubits in placements:
                for q, index in zip(qubits, thetas):
                    self.rotation(GateKind.RY, q, index, tag)
                a, b, c, d = qubits
                self.ring([(a, b), (b, c), (c, d), (d, a)], phis, tag)

    def three_qubit_layer(self):
        width = self.config.f3_entanglement
        cache: dict = {}
        for s, placements in enumerate(F3_PLACEMENTS, start=1):
            thetas = self.sublayer_params("f3.theta", s, ["1", "2", "3"], cache)
            phis = None
            if self.parameterized_entangler:
                phis = self.sublayer_params("f3.phi", s, [str(i + 1) for i in range(width)], cache)
            tag = f"f3.s{s}"
            for qubits, extra in placements:
                for q, index in zip(qubits, thetas):
                    self.rotation(GateKind.RY, q, index, tag)
                a, b, c = qubits
                if width == 4:
                    links = [(a, b), (b, c), (c, extra), (extra, a)]
                else:
                    links = [(a, b), (b, c), (c, a)]
                self.ring(links, phis, tag)

    def two_qubit_layer(self):
        cache: dict = {}
        for s, placements in enumerate(F2_PLACEMENTS, start=1):
            thetas = self.sublayer_params("f2.theta", s, ["1", "2", "3", "4"], cache)
            tag = f"f2.s{s}"
            for qubits in placements:
                for q, index in zip(qubits, thetas):
                    self.rotation(GateKind.RY, q, index, tag)
                a, b, c, d = qubits
                self.cnot(a, b, tag)
                self.cnot(c, d, tag)
                for control, target in [(b, c), (c, d), (d, a), (a, b)]:
                    self.cnot(control, target, tag)

    def pooling(self, prefix: str, pairs: Sequence[Tuple[int, int]]):
        """CRZ when the dropped qubit is 1, CRX when it is 0, onto the kept qubit."""
        gamma_z, gamma_x = self.params.block(prefix, ["gamma_z", "gamma_x"])
        for dropped, kept in pairs:
            self.controlled(GateKind.CRZ, dropped, kept, gamma_z, prefix, polarity=1)
            self.controlled(GateKind.CRX, dropped, kept, gamma_x, prefix, polarity=0)

    def regular_layers(self):
        a, b, c, d = POOL1_KEPT
        forward = [(a, b), (b, c), (c, d), (d, a)]
        backward = [(d, c), (c, b), (b, a), (a, d)]
        for layer in range(1, self.config.num_regular_layers + 1):
            tag = f"regular.{layer}"
            thetas = self.params.block(tag, ["1", "2", "3", "4"])
            for q, index in zip(POOL1_KEPT, thetas):
                self.rotation(GateKind.RY, q, index, tag)
            for control, target in forward + backward:
                self.cnot(control, target, tag)

    def final_filter(self):
        first, second = FINAL_QUBITS
        thetas = self.params.block("final.theta", ["1", "2"])
        self.rotation(GateKind.RY, first, thetas[0], "final")
        self.rotation(GateKind.RY, second, thetas[1], "final")
        phis = self.params.block("final.phi", ["1", "2"]) if self.parameterized_entangler else None
        self.ring([(first, second), (second, first)], phis, "final")

    def output_cascade(self):
        first, second = FINAL_QUBITS
        for ancilla, (bit1, bit2) in zip(ANCILLA_QUBITS, CLASS_CODES):
            self.ops.append(ParamOp(ancilla_flip_gate(first, second, ancilla, bit1, bit2), None, "cascade"))

    def cnot_readout(self):
        for qubit, ancilla in zip(POOL1_KEPT, ANCILLA_QUBITS):
            self.cnot(qubit, ancilla, "readout")

    def finish(self, name: str) -> ParamCircuit:
        return ParamCircuit(
            num_qubits=NUM_QUBITS,
            ops=tuple(self.ops),
            num_params=len(self.params.labels),
            data_qubits=DATA_QUBITS,
            ancilla_qubits=ANCILLA_QUBITS,
            readout=ANCILLA_QUBITS,
            virtual_qubit=VIRTUAL_QUBIT,
            name=name,
            param_labels=tuple(self.params.labels),
            config=self.config.model_dump(),
        )


def _preliminary_and_regular(builder: _Builder):
    builder.four_qubit_layer("f4")
    builder.three_qubit_layer()
    builder.two_qubit_layer()
    builder.four_qubit_layer("conv")
    builder.pooling("pool1", POOL1_PAIRS)
    builder.regular_layers()


def build_qcnn_circuit(config: Optional[ArchitectureConfig] = None) -> ParamCircuit:
    """
    Full classifier circuit.

    Without the output cascade the ancillas are read through one CNOT each
    from the four qubits kept by the first pooling, and the post-regular
    stages are skipped since nothing would read them.
    """
    config = config or ArchitectureConfig()
    builder = _Builder(config)
    _preliminary_and_regular(builder)
    if not config.include_output_cascade:
        builder.cnot_readout()
        return builder.finish("full")
    builder.pooling("pool2", POOL2_PAIRS)
    if config.include_final_filter:
        builder.final_filter()
    builder.output_cascade()
    return builder.finish("full")


def build_reference_circuit(config: Optional[ArchitectureConfig] = None) -> ParamCircuit:
    """
    Ablation circuit: CNOT entanglers everywhere, nothing after the regular
    layers, ancillas copied from the four surviving qubits by CNOT.
    Only num_regular_layers, share_across_sublayers and f3_entanglement are
    taken from `config`.
    """
    config = config or ArchitectureConfig()
    reference = config.model_copy(update={
        "entangler": "cnot",
        "include_final_filter": False,
        "include_output_cascade": False,
    })
    builder = _Builder(reference)
    _preliminary_and_regular(builder)
    builder.cnot_readout()
    return builder.finish("reference")


def build_circuit(arch: str, config: Optional[ArchitectureConfig] = None) -> ParamCircuit:
    """Dispatch on the architecture name used by the CLI ("full" or "reference")."""
    if arch == "reference":
        return build_reference_circuit(config)
    return build_qcnn_circuit(config)


def partner_qubits(circuit: ParamCircuit) -> Tuple[int, ...]:
    """Data qubit copied onto each readout ancilla by a CNOT readout."""
    partners = {op.gate.target: op.gate.controls[0][0] for op in circuit.ops if op.tag == "readout"}
    return tuple(partners[a] for a in circuit.readout)


def build_toy_circuit() -> ParamCircuit:
    """
    Two-wire check circuit: RY(theta_0) on wire 0 copied onto wire 1.
    The single logit P(wire 1 = 1) equals sin^2(theta_0 / 2).
    """
    ops = (
        ParamOp(GateOp(GateKind.RY, 0), ParamRef(0), "toy"),
        ParamOp(GateOp(GateKind.CNOT, 1, ((0, 1),)), None, "readout"),
    )
    return ParamCircuit(
        num_qubits=2,
        ops=ops,
        num_params=1,
        data_qubits=(0,),
        ancilla_qubits=(1,),
        readout=(1,),
        name="toy",
        param_labels=("toy.ry",),
    )
