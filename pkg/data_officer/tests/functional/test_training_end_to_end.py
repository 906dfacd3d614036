"""Desk-scale training runs and checks against the real datasets."""

import os

import pytest

from src.baseline.training import baseline_train
from src.circuits.architecture import build_circuit, build_qcnn_circuit
from src.data.idx import (
    ClassSubsetSpec,
    compare_with_published,
    count_by_class,
    load_idx,
    make_baseline_dataset,
    make_dataset,
    resolve_paths,
)
from src.training.loop import train
from src.training.optimizer import Hyperparams
from src.training.parallel import default_workers
from src.utils.config import DATA_DIR_ENV

SUBSET = ClassSubsetSpec.parse("0,1,2,3")
REAL_DATA = os.environ.get(DATA_DIR_ENV)
DESK_SCALE = 200
# Explicit rates for short desk runs; the defaults barely move in a few epochs
SMOKE_LR = 0.1
QCNN_DESK_LR = 0.02
BASELINE_DESK_LR = 0.01


def splits(directory, build, limit=None):
    train_records = load_idx(*resolve_paths(directory, "mnist", "train"))
    test_records = load_idx(*resolve_paths(directory, "mnist", "test"))
    return build(train_records, SUBSET, limit), build(test_records, SUBSET, limit)


def final_test_accuracy(state):
    return state["history"][-1]["test_acc"]


@pytest.mark.slow
class TestQuantumSmoke:
    """80 train / 40 test images, 30 epochs, batch 16"""

    def test_loss_falls_and_worker_count_is_irrelevant(self, desk_files):
        train_set, test_set = splits(desk_files, make_dataset)
        assert (len(train_set), len(test_set)) == (80, 40)
        circuit = build_qcnn_circuit()
        h = Hyperparams(learning_rate=SMOKE_LR, epochs=30, batch_size=16, seed=0)

        serial = train(circuit, train_set, test_set, h, workers=1)["history"]
        parallel = train(circuit, train_set, test_set, h, workers=2)["history"]

        assert len(serial) == 30
        assert serial[-1]["train_loss"] <= 0.8 * serial[0]["train_loss"]
        assert parallel == serial


@pytest.mark.slow
class TestBaselineDesk:
    """200 train / 200 test per class, 50 epochs"""

    def test_accuracy_above_threshold(self, desk_scale_files):
        train_set, test_set = splits(desk_scale_files, make_baseline_dataset)
        assert (len(train_set), len(test_set)) == (800, 800)
        h = Hyperparams(learning_rate=BASELINE_DESK_LR, epochs=50, batch_size=32, seed=0)
        state = baseline_train(train_set, test_set, h, workers=default_workers())
        assert final_test_accuracy(state) > 0.6


@pytest.mark.slow
@pytest.mark.skipif(not REAL_DATA, reason=f"{DATA_DIR_ENV} not set")
class TestDeskScaleAccuracy:
    """Digits 0..3 at 200/200 per class, 50 epochs (hours; scheduled runs only)"""

    def test_full_at_least_reference(self):
        train_set, test_set = splits(REAL_DATA, make_dataset, DESK_SCALE)
        h = Hyperparams(learning_rate=QCNN_DESK_LR, epochs=50, batch_size=32, seed=0)
        full = final_test_accuracy(train(build_circuit("full"), train_set, test_set, h, default_workers()))
        reference = final_test_accuracy(train(build_circuit("reference"), train_set, test_set, h, default_workers()))
        print(f"[ABLATION] full {full:.4f} reference {reference:.4f}")
        assert full >= 0.70
        assert full >= reference

    def test_baseline_accuracy(self):
        train_set, test_set = splits(REAL_DATA, make_baseline_dataset, DESK_SCALE)
        h = Hyperparams(learning_rate=BASELINE_DESK_LR, epochs=50, batch_size=32, seed=0)
        assert final_test_accuracy(baseline_train(train_set, test_set, h, default_workers())) > 0.6


@pytest.mark.skipif(not REAL_DATA, reason=f"{DATA_DIR_ENV} not set")
class TestRealMnist:
    """Published per-class counts of the standard files"""

    def test_train_counts(self):
        records = load_idx(*resolve_paths(REAL_DATA, "mnist", "train"))
        assert len(records) == 60000
        counts = count_by_class(records)
        assert compare_with_published(counts, "mnist", "train") == {}
        assert sum(counts[c] for c in (3, 4, 5, 6)) == 23313

    def test_test_subset_size(self):
        records = load_idx(*resolve_paths(REAL_DATA, "mnist", "test"))
        assert len(make_dataset(records, SUBSET)) == 4157
        assert count_by_class(records)[3] == 1010
