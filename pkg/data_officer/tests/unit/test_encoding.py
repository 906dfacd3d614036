"""Tests of normalization and amplitude encoding."""

import numpy as np
import pytest

from src.data.encoding import EncodedImage, amplitude_encode, normalize_vector
from src.simulator.statevector import probability_one
from src.utils.errors import ConfigurationError, DegenerateInputError, InvalidInputError


class TestNormalizeVector:
    def test_unit_norm(self):
        pixels = np.arange(256, dtype=float)
        out = normalize_vector(pixels)
        assert np.sum(out ** 2) == pytest.approx(1.0, abs=1e-12)
        assert np.all(out >= 0)

    def test_constant_image(self):
        out = normalize_vector(np.full(256, 7.0))
        np.testing.assert_allclose(out, np.full(256, 1 / 16))

    def test_zero_image_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            normalize_vector(np.zeros(256))

    def test_negative_pixels(self):
        pixels = np.ones(256)
        pixels[3] = -1
        with pytest.raises(InvalidInputError):
            normalize_vector(pixels)

    def test_wrong_size(self):
        with pytest.raises(InvalidInputError):
            normalize_vector(np.ones(255))


class TestEncodedImage:
    def test_coeffs_read_only(self):
        img = EncodedImage(np.full(256, 1 / 16), 2)
        with pytest.raises(ValueError):
            img.coeffs[0] = 1.0

    def test_not_normalized(self):
        with pytest.raises(InvalidInputError):
            EncodedImage(np.ones(256), 0)

    @pytest.mark.parametrize("label", [-1, 4])
    def test_label_range(self, label):
        with pytest.raises(InvalidInputError):
            EncodedImage(np.full(256, 1 / 16), label)


class TestAmplitudeEncode:
    """Data register holds the coefficients, every other wire is |0>"""

    def test_coefficients_on_shifted_indices(self):
        rng = np.random.default_rng(4)
        coeffs = normalize_vector(rng.uniform(0, 1, 256))
        state = amplitude_encode(EncodedImage(coeffs, 0), 13)
        assert state.amps.shape == (8192,)
        np.testing.assert_array_equal(state.amps[np.arange(256) << 5].real, coeffs)
        mask = np.ones(8192, dtype=bool)
        mask[np.arange(256) << 5] = False
        assert not np.any(state.amps[mask])
        for wire in range(8, 13):
            assert probability_one(state, wire) == 0.0

    def test_first_coefficient_is_ground_state(self):
        coeffs = np.zeros(256)
        coeffs[0] = 1.0
        state = amplitude_encode(EncodedImage(coeffs, 1), 8)
        assert state.amps[0] == 1.0

    def test_msb_pixel_mapping(self):
        coeffs = np.zeros(256)
        coeffs[128] = 1.0
        state = amplitude_encode(EncodedImage(coeffs, 1), 13)
        assert probability_one(state, 0) == 1.0
        assert probability_one(state, 7) == 0.0

    def test_random_images_round_trip_and_marginal(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            coeffs = normalize_vector(rng.integers(0, 256, 256).astype(np.float64))
            state = amplitude_encode(EncodedImage(coeffs, 0), 13)
            data = state.amps[np.arange(256) << 5]
            np.testing.assert_array_equal(data.real, coeffs)
            assert not np.any(data.imag)
            assert abs(probability_one(state, 0) - np.sum(coeffs[128:] ** 2)) < 1e-12

    def test_too_few_qubits(self):
        with pytest.raises(ConfigurationError):
            amplitude_encode(EncodedImage(np.full(256, 1 / 16), 0), 7)
