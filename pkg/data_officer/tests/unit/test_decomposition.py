"""Tests of the Gray-code lowering of controlled rotations."""

import numpy as np
import pytest

from src.simulator.decomposition import (
    PatternAngles,
    ancilla_flip_gate,
    ancilla_flip_toffoli,
    angle_transform,
    decompose_controlled_rotation,
    gray_code,
    lower_gate,
    transform_matrix,
    uniformly_controlled_rotation,
)
from src.simulator.statevector import GateKind, GateOp, unitary_of
from src.utils.errors import ConfigurationError, InvalidInputError

NATIVE = {"X": GateKind.CRX, "Y": GateKind.CRY, "Z": GateKind.CRZ}


def assert_same_unitary(ops_a, ops_b, n, atol=1e-12):
    np.testing.assert_allclose(unitary_of(ops_a, n), unitary_of(ops_b, n), atol=atol)


class TestAngleTransform:
    """alpha = M theta"""

    def test_gray_codes(self):
        assert gray_code(1) == [0, 1]
        assert gray_code(2) == [0, 1, 3, 2]

    def test_one_control_example(self):
        plan = angle_transform(PatternAngles(np.array([0.0, 1.0])))
        np.testing.assert_allclose(plan.alphas, [0.5, -0.5])
        assert plan.cnot_controls == (0, 0)

    def test_two_control_cnot_order(self):
        plan = angle_transform(PatternAngles(np.zeros(4)), controls=[5, 9])
        assert plan.cnot_controls == (9, 5, 9, 5)

    def test_matrix_inverse(self):
        for c in (1, 2):
            size = 2 ** c
            matrix = transform_matrix(c)
            np.testing.assert_allclose(matrix @ (size * matrix.T), np.eye(size), atol=1e-15)

    def test_three_controls_rejected(self):
        with pytest.raises(ConfigurationError):
            angle_transform(PatternAngles(np.zeros(8)))

    def test_pattern_length_validated(self):
        with pytest.raises(InvalidInputError):
            PatternAngles(np.zeros(3))

    def test_equal_pattern_angles_need_one_rotation(self):
        plan = angle_transform(PatternAngles(np.full(4, 0.9)))
        np.testing.assert_allclose(plan.alphas, [0.9, 0.0, 0.0, 0.0], atol=1e-15)

    @pytest.mark.parametrize("c", [1, 2])
    def test_inverse_recovers_pattern_angles(self, c):
        rng = np.random.default_rng(c)
        size = 2 ** c
        for _ in range(20):
            theta = rng.uniform(-np.pi, np.pi, size)
            alphas = angle_transform(PatternAngles(theta)).alphas
            np.testing.assert_allclose(size * transform_matrix(c).T @ alphas, theta, atol=1e-14)

    def test_cascade_blocks_recover_pattern_angles(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            theta = rng.uniform(-np.pi, np.pi, 4)
            unitary = unitary_of(uniformly_controlled_rotation("Y", theta, [0, 1], 2), 3)
            recovered = [2 * np.arctan2(unitary[2 * p + 1, 2 * p].real, unitary[2 * p, 2 * p].real)
                         for p in range(4)]
            np.testing.assert_allclose(recovered, theta, atol=1e-10)


class TestControlledRotation:
    """Single-control lowering against the native gate"""

    @pytest.mark.parametrize("axis", ["X", "Y", "Z"])
    @pytest.mark.parametrize("polarity", [0, 1])
    def test_matches_native(self, axis, polarity):
        rng = np.random.default_rng(ord(axis) + polarity)
        for theta in rng.uniform(-2 * np.pi, 2 * np.pi, 50):
            lowered = decompose_controlled_rotation(axis, theta, control=0, target=1, polarity=polarity)
            native = [GateOp(NATIVE[axis], 1, ((0, polarity),), theta)]
            assert_same_unitary(lowered, native, 2)

    def test_crz_zero_is_identity(self):
        lowered = decompose_controlled_rotation("Z", 0.0, 0, 1)
        np.testing.assert_allclose(unitary_of(lowered, 2), np.eye(4), atol=1e-15)

    def test_control_equals_target(self):
        with pytest.raises(InvalidInputError):
            decompose_controlled_rotation("Y", 0.5, 1, 1)

    def test_only_basic_gates(self):
        lowered = decompose_controlled_rotation("X", 0.5, 2, 0)
        assert {op.kind for op in lowered} <= {GateKind.RY, GateKind.RZ, GateKind.CNOT, GateKind.X}


class TestUniformlyControlled:
    """Pattern-dependent rotations"""

    @pytest.mark.parametrize("axis", ["Y", "Z"])
    def test_two_controls_match_blockwise(self, axis):
        theta = np.array([0.3, -1.1, 2.0, 0.7])
        lowered = uniformly_controlled_rotation(axis, theta, [0, 1], 2)
        reference = []
        for pattern, angle in enumerate(theta):
            controls = ((0, pattern >> 1), (1, pattern & 1))
            if axis == "Y":
                reference.append(GateOp(GateKind.CCRY, 2, controls, float(angle)))
        if axis == "Y":
            assert_same_unitary(lowered, reference, 3)
        else:
            unitary = unitary_of(lowered, 3)
            for pattern, angle in enumerate(theta):
                block = unitary[2 * pattern:2 * pattern + 2, 2 * pattern:2 * pattern + 2]
                np.testing.assert_allclose(np.diag(block), [np.exp(-0.5j * angle), np.exp(0.5j * angle)],
                                           atol=1e-12)


class TestToffoli:
    """CC-RY(pi) ancilla flip"""

    @pytest.mark.parametrize("p1,p2", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_flips_only_on_matching_pattern(self, p1, p2):
        ops = ancilla_flip_toffoli(0, 1, 2, p1, p2)
        unitary = unitary_of(ops, 3)
        for b1 in (0, 1):
            for b2 in (0, 1):
                column = unitary[:, (b1 << 2) | (b2 << 1)]
                flipped = (b1, b2) == (p1, p2)
                expected = (b1 << 2) | (b2 << 1) | int(flipped)
                np.testing.assert_allclose(abs(column[expected]), 1.0, atol=1e-12)

    def test_matches_ccx_on_target_zero_columns(self):
        ccx = np.eye(8)[:, [0, 1, 2, 3, 4, 5, 7, 6]]
        unitary = unitary_of(ancilla_flip_toffoli(0, 1, 2), 3)
        for k in (0, 2, 4, 6):
            np.testing.assert_allclose(unitary[:, k], ccx[:, k], atol=1e-12)

    @pytest.mark.parametrize("p1,p2", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_flip_twice(self, p1, p2):
        """Populations return exactly; the matching pattern picks up a -1"""
        twice = unitary_of(ancilla_flip_toffoli(0, 1, 2, p1, p2) * 2, 3)
        for b1 in (0, 1):
            for b2 in (0, 1):
                k = (b1 << 2) | (b2 << 1)
                sign = -1.0 if (b1, b2) == (p1, p2) else 1.0
                np.testing.assert_allclose(np.abs(twice[:, k]) ** 2, np.eye(8)[:, k], atol=1e-12)
                np.testing.assert_allclose(twice[:, k], sign * np.eye(8)[:, k], atol=1e-12)

    def test_native_gate(self):
        gate = ancilla_flip_gate(3, 7, 9, 1, 0)
        assert gate.kind == GateKind.CCRY
        assert gate.angle == np.pi
        assert gate.controls == ((3, 1), (7, 0))

    def test_matches_native_ccry_pi(self):
        assert_same_unitary(
            ancilla_flip_toffoli(0, 1, 2),
            [GateOp(GateKind.CCRY, 2, ((0, 1), (1, 1)), np.pi)],
            3,
        )

    def test_repeated_qubits(self):
        with pytest.raises(InvalidInputError):
            ancilla_flip_toffoli(0, 0, 1)


class TestLowerGate:
    """Coefficient-carrying steps shared by every lowering"""

    def test_single_control_coefficients(self):
        steps = lower_gate(GateOp(GateKind.CRY, 1, ((0, 1),)))
        assert [s.coefficient for s in steps if s.coefficient is not None] == [0.5, -0.5]
        assert [s.gate.kind for s in steps] == [GateKind.RY, GateKind.CNOT, GateKind.RY, GateKind.CNOT]

    def test_crx_framing_is_literal(self):
        steps = lower_gate(GateOp(GateKind.CRX, 1, ((0, 0),)))
        assert steps[0].gate.kind == GateKind.X and steps[-1].gate.kind == GateKind.X
        framing = [s for s in steps if s.gate.kind == GateKind.RZ]
        assert [s.gate.angle for s in framing] == [np.pi / 2, -np.pi / 2]
        assert all(s.coefficient is None for s in framing)

    def test_ccry_quarter_coefficients(self):
        steps = lower_gate(GateOp(GateKind.CCRY, 2, ((0, 1), (1, 1))))
        coefficients = [s.coefficient for s in steps if s.coefficient is not None]
        np.testing.assert_allclose(coefficients, [0.25, -0.25, 0.25, -0.25])

    def test_bound_steps_match_native(self):
        gate = GateOp(GateKind.CCRY, 0, ((2, 0), (1, 1)), 1.7)
        bound = [step.bind(gate.angle) for step in lower_gate(gate)]
        assert_same_unitary(bound, [gate], 3)

    @pytest.mark.parametrize("kind", [GateKind.RY, GateKind.CNOT, GateKind.X])
    def test_basic_kinds_have_no_lowering(self, kind):
        controls = ((1, 1),) if kind == GateKind.CNOT else ()
        with pytest.raises(InvalidInputError):
            lower_gate(GateOp(kind, 0, controls))
