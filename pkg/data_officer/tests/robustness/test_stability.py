"""Numerical stability of long gate sequences and extreme parameters."""

import numpy as np
import pytest

from src.circuits.ir import lower
from src.data.encoding import EncodedImage
from src.simulator.statevector import GateKind, GateOp, new_state, run_circuit
from src.training.gradients import forward, parameter_shift_gradient, simulate
from src.training.losses import softmax_cross_entropy


def random_image(seed):
    coeffs = np.random.default_rng(seed).uniform(0, 1, 256)
    return EncodedImage(coeffs / np.linalg.norm(coeffs), seed % 4)


class TestNorm:
    def test_long_random_sequence(self):
        rng = np.random.default_rng(1)
        kinds = [GateKind.RX, GateKind.RY, GateKind.RZ]
        ops = []
        for _ in range(2000):
            target = int(rng.integers(6))
            if rng.random() < 0.3:
                control = int((target + 1 + rng.integers(5)) % 6)
                ops.append(GateOp(GateKind.CNOT, target, ((control, 1),)))
            else:
                ops.append(GateOp(kinds[int(rng.integers(3))], target, angle=float(rng.uniform(-10, 10))))
        state = run_circuit(new_state(6), ops)
        assert abs(state.norm() - 1.0) < 1e-10

    @pytest.mark.parametrize("scale", [1e-8, 1.0, 1e3])
    def test_full_circuit_norm(self, default_circuit, scale):
        theta = np.random.default_rng(2).uniform(-scale, scale, default_circuit.num_params)
        state = simulate(default_circuit, theta, random_image(3))
        assert abs(state.norm() - 1.0) < 1e-10


class TestGradientsAtExtremes:
    def test_periodicity(self, small_circuit):
        theta = np.random.default_rng(4).uniform(-np.pi, np.pi, small_circuit.num_params)
        img = random_image(5)
        np.testing.assert_allclose(forward(small_circuit, theta + 4 * np.pi, img),
                                   forward(small_circuit, theta, img), atol=1e-10)

    def test_gradient_finite_at_large_angles(self, small_circuit):
        lowered = lower(small_circuit)
        theta = np.full(small_circuit.num_params, 1e4)
        img = random_image(6)
        _, weights = softmax_cross_entropy(forward(lowered, theta, img), img.label)
        grad = parameter_shift_gradient(lowered, theta, img, weights)
        assert np.all(np.isfinite(grad))
