"""Tests of the forward pass, parameter-shift gradients and scoring."""

import numpy as np
import pytest

from src.circuits.architecture import build_toy_circuit
from src.circuits.ir import ParamCircuit, ParamOp, ParamRef, lower
from src.data.encoding import EncodedImage
from src.simulator.statevector import GateKind, GateOp
from src.training.gradients import (
    evaluate,
    finite_difference_gradient,
    forward,
    gradient_check,
    parameter_shift_gradient,
    sample_loss_and_gradient,
    score_logits,
)
from src.training.losses import softmax_cross_entropy
from src.utils.errors import InvalidInputError


def mini_circuit() -> ParamCircuit:
    """Ten wires: eight data qubits and two readout ancillas."""
    ops = (
        ParamOp(GateOp(GateKind.RY, 0), ParamRef(0), "body"),
        ParamOp(GateOp(GateKind.CRY, 3, ((0, 1),)), ParamRef(1), "body"),
        ParamOp(GateOp(GateKind.CRX, 5, ((3, 0),)), ParamRef(2, 2.0), "body"),
        ParamOp(GateOp(GateKind.CRZ, 1, ((5, 1),)), ParamRef(0, -1.0, 0.3), "body"),
        ParamOp(GateOp(GateKind.CCRY, 7, ((1, 1), (5, 0))), ParamRef(1), "body"),
        ParamOp(GateOp(GateKind.RX, 7), ParamRef(2), "body"),
        ParamOp(GateOp(GateKind.CNOT, 8, ((3, 1),)), None, "readout"),
        ParamOp(GateOp(GateKind.CNOT, 9, ((7, 1),)), None, "readout"),
    )
    return ParamCircuit(num_qubits=10, ops=ops, num_params=3, data_qubits=tuple(range(8)),
                        ancilla_qubits=(8, 9), readout=(8, 9), name="mini")


def random_image(rng, label) -> EncodedImage:
    coeffs = rng.uniform(0, 1, 256)
    return EncodedImage(coeffs / np.linalg.norm(coeffs), label)


@pytest.fixture
def samples():
    rng = np.random.default_rng(21)
    return [(rng.uniform(-np.pi, np.pi, 3), random_image(rng, i % 2)) for i in range(3)]


class TestForward:
    def test_logits_are_probabilities(self, samples):
        for theta, img in samples:
            logits = forward(mini_circuit(), theta, img)
            assert logits.shape == (2,)
            assert np.all((logits >= 0) & (logits <= 1))

    def test_theta_length_checked(self):
        with pytest.raises(InvalidInputError):
            forward(mini_circuit(), [0.1, 0.2], None)


class TestParameterShift:
    """Shift rule against finite differences and against itself"""

    def test_toy_analytic(self):
        toy = build_toy_circuit()
        for theta in (-2.1, 0.0, 0.4, 1.9):
            for method in ("sweep", "shifted"):
                grad = parameter_shift_gradient(toy, [theta], None, [1.0], method)
                assert grad[0] == pytest.approx(np.sin(theta) / 2, abs=1e-12)

    def test_sweep_matches_shifted(self, samples):
        lowered = lower(mini_circuit())
        for theta, img in samples:
            weights = np.array([0.7, -1.3])
            sweep = parameter_shift_gradient(lowered, theta, img, weights, "sweep")
            shifted = parameter_shift_gradient(lowered, theta, img, weights, "shifted")
            np.testing.assert_allclose(sweep, shifted, atol=1e-12)

    def test_matches_finite_differences(self, samples):
        deviations = gradient_check(mini_circuit(), samples)
        assert max(deviations) <= 1e-6

    def test_qcnn_matches_finite_differences(self, small_circuit):
        rng = np.random.default_rng(8)
        sample = (rng.uniform(-np.pi, np.pi, small_circuit.num_params), random_image(rng, 3))
        assert gradient_check(small_circuit, [sample])[0] <= 1e-6

    @pytest.mark.slow
    def test_full_circuit_matches_finite_differences(self, default_circuit):
        rng = np.random.default_rng(9)
        samples = [(rng.uniform(-np.pi, np.pi, default_circuit.num_params), random_image(rng, k % 4))
                   for k in range(5)]
        deviations = gradient_check(default_circuit, samples)
        assert len(deviations) == 5
        assert max(deviations) <= 1e-6

    def test_wrong_shift_is_detected(self, samples):
        deviations = gradient_check(mini_circuit(), samples, method="shifted", shift=1.0)
        assert max(deviations) > 1e-3

    def test_requires_lowered_circuit(self, samples):
        theta, img = samples[0]
        with pytest.raises(InvalidInputError, match="lower"):
            parameter_shift_gradient(mini_circuit(), theta, img, [1.0, 0.0])

    def test_weight_length_checked(self, samples):
        theta, img = samples[0]
        with pytest.raises(InvalidInputError):
            parameter_shift_gradient(lower(mini_circuit()), theta, img, [1.0, 0.0, 0.0])

    def test_unknown_method(self, samples):
        theta, img = samples[0]
        with pytest.raises(InvalidInputError):
            parameter_shift_gradient(lower(mini_circuit()), theta, img, [1.0, 0.0], "adjoint")

    def test_sample_loss_and_gradient(self, samples):
        theta, img = samples[1]
        lowered = lower(mini_circuit())
        loss, logits, grad = sample_loss_and_gradient(lowered, theta, img)
        expected_loss, _ = softmax_cross_entropy(forward(mini_circuit(), theta, img), img.label)
        assert loss == pytest.approx(expected_loss, abs=1e-12)
        np.testing.assert_allclose(grad, finite_difference_gradient(mini_circuit(), theta, img), atol=1e-6)
        assert logits.shape == (2,)


class TestScoring:
    def test_ties_go_to_lowest_index(self):
        rng = np.random.default_rng(0)
        dataset = [random_image(rng, 0), random_image(rng, 2)]
        acc, confusion = score_logits(dataset, [np.array([0.5, 0.5, 0.1, 0.0]), np.array([0.3, 0.1, 0.3, 0.3])])
        assert acc == 0.5
        assert confusion[0, 0] == 1
        assert confusion[2, 0] == 1
        assert confusion.sum() == 2

    def test_empty_dataset(self):
        with pytest.raises(InvalidInputError):
            score_logits([], [])
        with pytest.raises(InvalidInputError):
            evaluate(mini_circuit(), np.zeros(3), [])

    def test_evaluate_counts_every_sample(self, samples):
        dataset = [img for _, img in samples]
        acc, confusion = evaluate(mini_circuit(), samples[0][0], dataset)
        assert confusion.sum() == len(dataset)
        assert 0.0 <= acc <= 1.0
