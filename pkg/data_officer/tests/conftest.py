"""Shared fixtures: synthetic IDX files and an isolated experiment log."""

import os
import sys

import numpy as np
import pytest

project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), "../.."))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.circuits.architecture import ArchitectureConfig, build_qcnn_circuit
from src.data.idx import save_idx
from src.utils import logger

# Bright 8x8 block per digit; every class gets a distinct corner or centre
BLOCK_ORIGINS = {0: (2, 2), 1: (2, 18), 2: (18, 2), 3: (18, 18), 4: (10, 10), 5: (2, 10)}


def synthetic_images(labels, seed: int = 0) -> np.ndarray:
    """28x28 uint8 images: low noise plus a bright block placed by label."""
    rng = np.random.default_rng(seed)
    images = rng.integers(0, 30, size=(len(labels), 28, 28)).astype(np.uint8)
    for i, label in enumerate(labels):
        row, col = BLOCK_ORIGINS[int(label)]
        images[i, row:row + 8, col:col + 8] = rng.integers(180, 256, size=(8, 8))
    return images


def write_split(directory, prefix: str, labels, seed: int):
    images_path = os.path.join(directory, f"{prefix}-images-idx3-ubyte")
    labels_path = os.path.join(directory, f"{prefix}-labels-idx1-ubyte")
    save_idx(images_path, labels_path, synthetic_images(labels, seed), labels)
    return images_path, labels_path


@pytest.fixture(autouse=True)
def isolated_log(tmp_path):
    """Point the experiment log into the test's temp directory."""
    original = logger.get_log_file()
    logger.set_log_file(str(tmp_path / "logs" / "experiment_data.json"))
    yield logger.get_log_file()
    logger.set_log_file(original)


@pytest.fixture
def idx_dir(tmp_path):
    """
    Standard-named IDX files: 12 train and 6 test records per class for
    digits 0..5, labels interleaved.
    """
    directory = tmp_path / "mnist"
    directory.mkdir()
    write_split(str(directory), "train", [d for _ in range(12) for d in range(6)], seed=1)
    write_split(str(directory), "t10k", [d for _ in range(6) for d in range(6)], seed=2)
    return str(directory)


@pytest.fixture(scope="session")
def default_circuit():
    return build_qcnn_circuit()


@pytest.fixture(scope="session")
def small_circuit():
    """Full architecture with a single regular layer."""
    return build_qcnn_circuit(ArchitectureConfig(num_regular_layers=1))


@pytest.fixture(scope="session")
def desk_files(tmp_path_factory):
    """20 train and 10 test images per class for digits 0..3."""
    directory = str(tmp_path_factory.mktemp("desk"))
    write_split(directory, "train", [d for _ in range(20) for d in range(4)], seed=11)
    write_split(directory, "t10k", [d for _ in range(10) for d in range(4)], seed=12)
    return directory


@pytest.fixture(scope="session")
def desk_scale_files(tmp_path_factory):
    """200 train and 200 test images per class for digits 0..3."""
    directory = str(tmp_path_factory.mktemp("desk_scale"))
    write_split(directory, "train", [d for _ in range(200) for d in range(4)], seed=13)
    write_split(directory, "t10k", [d for _ in range(200) for d in range(4)], seed=14)
    return directory
