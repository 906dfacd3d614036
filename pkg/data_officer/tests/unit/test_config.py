"""Tests of configuration layering and validation."""

import os

import pytest

from src.data.presets import PRESETS, find_preset, get_preset
from src.training.optimizer import BASELINE_LEARNING_RATE, QCNN_LEARNING_RATE
from src.tools.artifacts import write_manifest
from src.utils.config import DATA_DIR_ENV, RunConfig, load_run_config, read_config_file
from src.utils.errors import ConfigurationError, InvalidInputError


def write_config(tmp_path, text):
    path = tmp_path / "run.env"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestPrecedence:
    """defaults < preset < file < flags"""

    def test_defaults(self):
        cfg = load_run_config({}, env={})
        assert cfg.epochs == 50
        assert cfg.batch == 32
        assert cfg.classes == "0,1,2,3"
        assert cfg.data_dir is None

    def test_file_overrides_defaults(self, tmp_path):
        path = write_config(tmp_path, "# desk run\nepochs=3\nbatch=8\nclasses=3,4,5,6\n")
        cfg = load_run_config({}, path, env={})
        assert (cfg.epochs, cfg.batch, cfg.classes) == (3, 8, "3,4,5,6")

    def test_flags_override_file(self, tmp_path):
        path = write_config(tmp_path, "epochs=3\nseed=4\n")
        cfg = load_run_config({"epochs": 7}, path, env={})
        assert cfg.epochs == 7
        assert cfg.seed == 4

    def test_none_flags_fall_through(self, tmp_path):
        path = write_config(tmp_path, "lr=0.01\n")
        assert load_run_config({"lr": None}, path, env={}).lr == 0.01

    def test_preset_below_file(self, tmp_path):
        path = write_config(tmp_path, "classes=1,2,8,0\n")
        cfg = load_run_config({"preset": "fashion-1289"}, path, env={})
        assert cfg.dataset == "fashion"
        assert cfg.classes == "1,2,8,0"

    def test_preset_alone(self):
        cfg = load_run_config({"preset": "mnist-3456"}, env={})
        assert (cfg.dataset, cfg.classes) == ("mnist", "3,4,5,6")

    def test_data_dir_from_environment(self):
        cfg = load_run_config({}, env={DATA_DIR_ENV: "/data/mnist"})
        assert cfg.data_dir == "/data/mnist"
        assert load_run_config({"data_dir": "/x"}, env={DATA_DIR_ENV: "/data/mnist"}).data_dir == "/x"


class TestValidation:
    def test_unknown_file_key(self, tmp_path):
        path = write_config(tmp_path, "epochz=3\n")
        with pytest.raises(ConfigurationError, match="epochz"):
            load_run_config({}, path, env={})

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            read_config_file(str(tmp_path / "absent.env"))

    @pytest.mark.parametrize("flags", [
        {"classes": "0,0,1,2"},
        {"classes": "0,1,2"},
        {"f3_entanglement": 5},
        {"batch": 0},
        {"lr": -1.0},
        {"entangler": "cz"},
    ])
    def test_invalid_values(self, flags):
        with pytest.raises(ConfigurationError):
            load_run_config(flags, env={})

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            load_run_config({"preset": "cifar"}, env={})

    def test_classes_canonicalized(self):
        assert load_run_config({"classes": " 3, 4,5 ,6"}, env={}).classes == "3,4,5,6"


class TestDerived:
    def test_learning_rate_defaults(self):
        cfg = RunConfig(workers=1)
        assert cfg.learning_rate("qcnn") == QCNN_LEARNING_RATE
        assert cfg.learning_rate("baseline") == BASELINE_LEARNING_RATE
        assert RunConfig(workers=1, lr=0.05).learning_rate("baseline") == 0.05

    def test_architecture_config(self):
        arch = RunConfig(workers=1, entangler="cnot", regular_layers=3, final_filter=False).architecture_config()
        assert arch.entangler == "cnot"
        assert arch.num_regular_layers == 3
        assert not arch.include_final_filter

    def test_hyperparams_for_zero_epochs(self):
        h = RunConfig(workers=1, epochs=0, seed=9).hyperparams()
        assert h.epochs == 1
        assert h.seed == 9

    def test_split_paths(self, tmp_path):
        cfg = RunConfig(workers=1, data_dir=str(tmp_path))
        images, labels = cfg.split_paths("test")
        assert os.path.basename(images) == "t10k-images-idx3-ubyte"
        assert os.path.basename(labels) == "t10k-labels-idx1-ubyte"
        explicit = RunConfig(workers=1, images="a", labels="b")
        assert explicit.split_paths("train") == ("a", "b")

    def test_split_paths_without_source(self):
        with pytest.raises(ConfigurationError, match=DATA_DIR_ENV):
            RunConfig(workers=1).split_paths("train")

    def test_split_limit(self):
        cfg = RunConfig(workers=1, limit=10, test_limit=4)
        assert cfg.split_limit("train") == 10
        assert cfg.split_limit("test") == 4
        assert RunConfig(workers=1, limit=10).split_limit("test") == 10


class TestPresets:
    def test_four_rows(self):
        assert len(PRESETS) == 4
        assert get_preset("mnist-0123").published_full == 90.03

    def test_find(self):
        assert find_preset("fashion", "1,2,8,9").name == "fashion-1289"
        assert find_preset("mnist", "0,1,2,4") is None


class TestManifestLayer:
    """Recorded run config sits above the preset and below the file"""

    def record(self, tmp_path, **fields):
        cfg = RunConfig(workers=1, out="runs/old", command="compare", **fields)
        write_manifest(str(tmp_path), {"config": cfg.model_dump()})
        return str(tmp_path)

    def test_recorded_values_used(self, tmp_path):
        cfg = load_run_config({}, env={}, manifest=self.record(tmp_path, epochs=3, classes="3,4,5,6", lr=0.02))
        assert (cfg.epochs, cfg.classes, cfg.lr, cfg.workers) == (3, "3,4,5,6", 0.02, 1)

    def test_invocation_keys_not_replayed(self, tmp_path):
        cfg = load_run_config({"command": "train"}, env={}, manifest=self.record(tmp_path))
        assert cfg.out == RunConfig.model_fields["out"].default
        assert cfg.command == "train"

    def test_file_and_flags_override(self, tmp_path):
        manifest = self.record(tmp_path / "run", epochs=3, seed=5, batch=4)
        path = write_config(tmp_path, "seed=6\nbatch=9\n")
        cfg = load_run_config({"batch": 2}, path, env={}, manifest=manifest)
        assert (cfg.epochs, cfg.seed, cfg.batch) == (3, 6, 2)

    def test_missing_config_block(self, tmp_path):
        write_manifest(str(tmp_path), {"model": "qcnn"})
        with pytest.raises(ConfigurationError, match="config block"):
            load_run_config({}, env={}, manifest=str(tmp_path))

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(InvalidInputError):
            load_run_config({}, env={}, manifest=str(tmp_path / "absent.json"))
