"""Main entry point for the QCNN experiment runner.

    python main.py train --model qcnn --classes 0,1,2,3 --limit 200 --epochs 50
    python main.py eval --out runs/latest
    python main.py gradcheck --samples 5
    python main.py inspect --arch reference
    python main.py compare --preset mnist-0123 --limit 200
    python main.py ingest --dataset fashion

Exit codes: 0 success, 2 input/IO error, 3 configuration or digest mismatch,
4 verification failure, 1 anything else.
"""

import argparse
import os
import sys
import traceback
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from src.baseline.cnn import (
    BaselineModel,
    baseline_backward,
    baseline_digest,
    baseline_forward,
    build_baseline,
    layer_table,
)
from src.baseline.training import baseline_train
from src.circuits.architecture import build_circuit, build_toy_circuit
from src.circuits.ir import ParamCircuit, dump_circuit, lower
from src.data.encoding import EncodedImage, normalize_vector
from src.data.idx import (
    compare_with_published,
    count_by_class,
    load_idx,
    make_baseline_dataset,
    make_dataset,
)
from src.data.presets import find_preset, get_preset
from src.tools.artifacts import (
    CHECKPOINT_FILE,
    METRICS_CSV,
    load_checkpoint,
    read_metrics_csv,
    save_checkpoint,
    write_evaluation,
    write_manifest,
    write_metrics,
)
from src.tools.report_generator import ReportGenerator
from src.training.gradients import (
    SHIFT,
    forward,
    gradient_check,
    parameter_shift_gradient,
    score_logits,
)
from src.training.loop import train
from src.training.losses import softmax_cross_entropy
from src.utils.config import RunConfig, load_run_config
from src.utils.errors import DigestMismatchError, QCNNError, VerificationError
from src.utils.logger import ActionType, log_experiment, set_log_file

# Load environment variables (QCNN_DATA_DIR)
load_dotenv()

GRADCHECK_TOLERANCE = 1e-6
TOY_TOLERANCE = 1e-10
BASELINE_TOLERANCE = 1e-5
LOG_NAME = "experiment_data.json"


def print_banner(command: str):
    print("=" * 60)
    print(f"QCNN EXPERIMENT RUNNER - {command}")
    print("=" * 60)


# ===== data =====

def load_split(cfg: RunConfig, split: str):
    images, labels = cfg.split_paths(split)
    records = load_idx(images, labels)
    print(f"[DATA] {split}: {len(records)} records from {images}")
    log_experiment("DataIngest", ActionType.DATA_INGEST,
                   {"dataset": cfg.dataset, "split": split, "records": len(records), "images": images},
                   "SUCCESS")
    return records


def load_datasets(cfg: RunConfig, model: str):
    """(train, test) samples for `model`, selected with the configured classes and limits."""
    build = make_baseline_dataset if model == "baseline" else make_dataset
    subset = cfg.subset()
    train_set = build(load_split(cfg, "train"), subset, cfg.split_limit("train"))
    test_set = build(load_split(cfg, "test"), subset, cfg.split_limit("test"))
    print(f"[DATA] classes {subset}: {len(train_set)} train / {len(test_set)} test samples")
    return train_set, test_set


def label_counts(dataset: Sequence) -> Dict[str, int]:
    counts = {str(c): 0 for c in range(4)}
    for sample in dataset:
        counts[str(sample.label)] += 1
    return counts


# ===== models =====

def build_model_circuit(cfg: RunConfig) -> ParamCircuit:
    return build_circuit(cfg.arch, cfg.architecture_config())


def run_model(cfg: RunConfig, model: str, arch: str, train_set, test_set) -> Dict[str, Any]:
    """Train one model and return what the artifacts need."""
    h = cfg.hyperparams(model)
    if model == "baseline":
        state = baseline_train(train_set, test_set, h, cfg.workers, cfg.epochs, cfg.pooling)
        initial = build_baseline(cfg.seed, pooling=cfg.pooling)
        return {"state": state, "arch": "baseline", "digest": baseline_digest(initial),
                "parameters": initial.parameter_count, "architecture": {"pooling": cfg.pooling}}
    circuit = build_circuit(arch, cfg.architecture_config())
    state = train(circuit, train_set, test_set, h, cfg.workers, cfg.epochs,
                  cfg.gradient_method, cfg.decomposed)
    return {"state": state, "arch": arch, "digest": circuit.arch_digest,
            "parameters": circuit.num_params, "architecture": circuit.config}


def write_run(cfg: RunConfig, out_dir: str, model: str, result: Dict[str, Any],
              train_set, test_set) -> None:
    state = result["state"]
    checkpoint = save_checkpoint(
        os.path.join(out_dir, CHECKPOINT_FILE),
        model=model, arch=result["arch"], arch_digest=result["digest"],
        classes=cfg.classes, dataset=cfg.dataset, state=state,
        extra={"decomposed": cfg.decomposed, "pooling": cfg.pooling},
    )
    metrics = write_metrics(out_dir, state["history"])
    write_manifest(out_dir, {
        "command": cfg.command,
        "model": model,
        "arch": result["arch"],
        "arch_digest": result["digest"],
        "parameters": result["parameters"],
        "architecture": result["architecture"],
        "config": cfg.model_dump(),
        "learning_rate": cfg.learning_rate(model),
        "dataset_counts": {"train": label_counts(train_set), "test": label_counts(test_set)},
        "rescale": "box-average 28x28 -> 16x16" if model == "qcnn" else "none (28x28 / 255)",
        "checkpoint": checkpoint,
        "metrics": metrics,
    })
    print(f"[ARTIFACTS] {out_dir}: checkpoint, metrics ({len(state['history'])} rows), manifest")


def recorded_metrics(manifest: str) -> List[Dict[str, float]]:
    run_dir = manifest if os.path.isdir(manifest) else os.path.dirname(manifest)
    return read_metrics_csv(os.path.join(run_dir, METRICS_CSV))


def verify_replay(recorded: List[Dict[str, float]], out_dir: str) -> None:
    """
    Raises:
        VerificationError: the replayed metrics differ from the recorded ones
    """
    replayed = read_metrics_csv(os.path.join(out_dir, METRICS_CSV))
    if replayed != recorded:
        mismatch = next((i for i, (a, b) in enumerate(zip(recorded, replayed)) if a != b),
                        min(len(recorded), len(replayed)))
        raise VerificationError(f"replayed metrics differ from the recorded run at row {mismatch + 1}")
    print(f"[ARTIFACTS] replay reproduces all {len(recorded)} recorded metric rows")


# ===== commands =====

def cmd_train(cfg: RunConfig) -> int:
    recorded = recorded_metrics(cfg.manifest) if cfg.manifest else None
    train_set, test_set = load_datasets(cfg, cfg.model)
    result = run_model(cfg, cfg.model, cfg.arch, train_set, test_set)
    write_run(cfg, cfg.out, cfg.model, result, train_set, test_set)
    if recorded is not None:
        verify_replay(recorded, cfg.out)
    return 0



def cmd_eval(cfg: RunConfig) -> int:
    path = cfg.checkpoint or os.path.join(cfg.out, CHECKPOINT_FILE)
    checkpoint = load_checkpoint(path)
    if checkpoint["model"] != cfg.model:
        raise DigestMismatchError(f"checkpoint holds a {checkpoint['model']} model, config asks for {cfg.model}")
    if checkpoint["classes"] != cfg.classes:
        raise DigestMismatchError(f"checkpoint classes {checkpoint['classes']} != requested {cfg.classes}")

    theta = checkpoint["theta"]
    if cfg.model == "baseline":
        model = BaselineModel(theta, cfg.pooling)
        digest = baseline_digest(model)
    else:
        circuit = build_model_circuit(cfg)
        digest = circuit.arch_digest
    if checkpoint["arch_digest"] != digest:
        raise DigestMismatchError(
            f"checkpoint architecture {checkpoint['arch_digest'][:12]} != configured {digest[:12]}"
        )

    build = make_baseline_dataset if cfg.model == "baseline" else make_dataset
    test_set = build(load_split(cfg, "test"), cfg.subset(), cfg.split_limit("test"))
    if cfg.model == "baseline":
        logits = [baseline_forward(model, sample.pixels) for sample in test_set]
    else:
        inference = lower(circuit) if checkpoint.get("decomposed", False) else circuit
        logits = [forward(inference, theta, img) for img in test_set]
    accuracy, confusion = score_logits(test_set, logits)

    print(f"accuracy: {accuracy!r}")
    print("confusion (rows = true, cols = predicted):")
    for row in confusion:
        print("  " + " ".join(f"{v:6d}" for v in row))
    write_evaluation(cfg.out, {"checkpoint": path, "arch_digest": digest, "classes": cfg.classes,
                               "samples": len(test_set), "accuracy": accuracy, "confusion": confusion})
    log_experiment("CLI", ActionType.EVALUATION,
                   {"accuracy": accuracy, "split": "eval", "checkpoint": path}, "SUCCESS")
    return 0


def _random_image(rng: np.random.Generator) -> EncodedImage:
    return EncodedImage(normalize_vector(rng.uniform(0.0, 1.0, 256)), int(rng.integers(4)))


def _gradcheck_toy(cfg: RunConfig, rng: np.random.Generator) -> float:
    circuit = build_toy_circuit()
    method = "shifted" if cfg.shift != SHIFT else cfg.gradient_method
    deviation = 0.0
    for _ in range(cfg.samples):
        theta = rng.uniform(-np.pi, np.pi, 1)
        shifted = parameter_shift_gradient(circuit, theta, None, [1.0], method, cfg.shift)
        deviation = max(deviation, abs(float(shifted[0]) - np.sin(theta[0]) / 2.0))
    return deviation


def _gradcheck_baseline(cfg: RunConfig, rng: np.random.Generator, step: float = 1e-6) -> float:
    deviation = 0.0
    for i in range(cfg.samples):
        model = build_baseline(cfg.seed + i, pooling=cfg.pooling)
        image = rng.uniform(0.0, 1.0, (28, 28))
        label = int(rng.integers(4))
        logits, cache = baseline_forward(model, image, return_cache=True)
        _, dl_dlogits = softmax_cross_entropy(logits, label)
        analytic = baseline_backward(model, cache, dl_dlogits)
        for k in range(model.parameter_count):
            plus, minus = model.params.copy(), model.params.copy()
            plus[k] += step
            minus[k] -= step
            loss_plus, _ = softmax_cross_entropy(baseline_forward(BaselineModel(plus, model.pooling), image), label)
            loss_minus, _ = softmax_cross_entropy(baseline_forward(BaselineModel(minus, model.pooling), image), label)
            deviation = max(deviation, abs(analytic[k] - (loss_plus - loss_minus) / (2 * step)))
    return deviation


def cmd_gradcheck(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    if cfg.toy:
        target, tolerance = "toy", TOY_TOLERANCE
        deviation = _gradcheck_toy(cfg, rng)
    elif cfg.model == "baseline":
        target, tolerance = "baseline", BASELINE_TOLERANCE
        deviation = _gradcheck_baseline(cfg, rng)
    else:
        circuit = build_model_circuit(cfg)
        target, tolerance = circuit.name, GRADCHECK_TOLERANCE
        method = "shifted" if cfg.shift != SHIFT else cfg.gradient_method
        samples = [(rng.uniform(-np.pi, np.pi, circuit.num_params), _random_image(rng))
                   for _ in range(cfg.samples)]
        deviation = max(gradient_check(circuit, samples, method, cfg.shift))

    passed = deviation <= tolerance
    print(f"[GRADCHECK] {target}: {cfg.samples} sample(s), max deviation {deviation:.3e} "
          f"(tolerance {tolerance:.0e}) {'PASS' if passed else 'FAIL'}")
    log_experiment("CLI", ActionType.GRADIENT_CHECK,
                   {"target": target, "samples": cfg.samples, "max_deviation": deviation,
                    "tolerance": tolerance}, "SUCCESS" if passed else "FAILURE")
    if not passed:
        raise VerificationError(f"gradient deviation {deviation:.3e} exceeds {tolerance:.0e}")
    return 0


def cmd_inspect(cfg: RunConfig) -> int:
    if cfg.model == "baseline":
        for name, shape, count in layer_table():
            print(f"{name:<8} {shape:>6} {count:>4}")
        parameters = build_baseline(cfg.seed).parameter_count
    else:
        circuit = build_model_circuit(cfg)
        print(dump_circuit(circuit), end="")
        print(f"roles: data={','.join(map(str, circuit.data_qubits))} "
              f"virtual={circuit.virtual_qubit} readout={','.join(map(str, circuit.readout))}")
        print(f"digest: {circuit.arch_digest}")
        parameters = circuit.num_params
    print(f"parameters: {parameters}")
    log_experiment("CLI", ActionType.INSPECTION, {"model": cfg.model, "parameters": parameters}, "SUCCESS")
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    quantum_train, quantum_test = load_datasets(cfg, "qcnn")
    classical_train, classical_test = load_datasets(cfg, "baseline")
    results = {}
    for name, model, arch, (train_set, test_set) in (
        ("full", "qcnn", "full", (quantum_train, quantum_test)),
        ("reference", "qcnn", "reference", (quantum_train, quantum_test)),
        ("classical", "baseline", "baseline", (classical_train, classical_test)),
    ):
        result = run_model(cfg, model, arch, train_set, test_set)
        write_run(cfg, os.path.join(cfg.out, name), model, result, train_set, test_set)
        results[name] = {"parameters": result["parameters"], "history": result["state"]["history"]}

    preset = get_preset(cfg.preset) if cfg.preset else find_preset(cfg.dataset, cfg.classes)
    reports = ReportGenerator(os.path.join(cfg.out, LOG_NAME), cfg.out)
    comparison = reports.generate_comparison_report(results, preset)
    reports.save_all_reports(comparison)
    reports.print_summary(comparison)
    return 0


def cmd_ingest(cfg: RunConfig) -> int:
    subset = cfg.subset()
    for split in ("train", "test"):
        records = load_split(cfg, split)
        counts = count_by_class(records)
        for label, count in counts.items():
            print(f"  label {label}: {count}")
        differences = compare_with_published(counts, cfg.dataset, split)
        if differences:
            for label, (observed, published) in differences.items():
                print(f"  label {label}: {observed} observed, {published} published")
        else:
            print("  counts match the published table")
        selected = sum(min(counts.get(c, 0), cfg.split_limit(split) or counts.get(c, 0)) for c in subset.classes)
        print(f"  subset {subset}: {selected} records")
    return 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
    "inspect": cmd_inspect,
    "compare": cmd_compare,
    "ingest": cmd_ingest,
}


# ===== argument parsing =====

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key=value config file (flags override it)")
    common.add_argument("--manifest", help="run directory or manifest.json to replay; train checks the metrics match")
    common.add_argument("--preset", help="dataset row: mnist-3456, mnist-0123, fashion-0123, fashion-1289")
    common.add_argument("--model", choices=["qcnn", "baseline"])
    common.add_argument("--arch", choices=["full", "reference"])
    common.add_argument("--entangler", choices=["cry", "cnot"])
    common.add_argument("--regular-layers", dest="regular_layers", type=int)
    common.add_argument("--f3-entanglement", dest="f3_entanglement", type=int, choices=[3, 4])
    common.add_argument("--unshared", dest="share_sublayers", action="store_const", const=False,
                        help="independent parameters for each sublayer")
    common.add_argument("--no-final-filter", dest="final_filter", action="store_const", const=False)
    common.add_argument("--pooling", choices=["average", "max"], help="baseline pooling")
    common.add_argument("--decomposed", action="store_const", const=True,
                        help="simulate the lowered circuit for inference too")
    common.add_argument("--classes", help="four distinct labels, e.g. 0,1,2,3")
    common.add_argument("--dataset", choices=["mnist", "fashion"])
    common.add_argument("--data-dir", dest="data_dir")
    common.add_argument("--images")
    common.add_argument("--labels")
    common.add_argument("--test-images", dest="test_images")
    common.add_argument("--test-labels", dest="test_labels")
    common.add_argument("--limit", type=int, help="samples per class (train, and test unless --test-limit)")
    common.add_argument("--test-limit", dest="test_limit", type=int)
    common.add_argument("--epochs", type=int)
    common.add_argument("--lr", type=float)
    common.add_argument("--batch", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--gradient-method", dest="gradient_method", choices=["sweep", "shifted"])
    common.add_argument("--out")
    common.add_argument("--checkpoint")
    common.add_argument("--samples", type=int, help="gradcheck samples")
    common.add_argument("--shift", type=float, help="gradcheck shift (the rule is exact only at pi/2)")
    common.add_argument("--toy", action="store_const", const=True, help="gradcheck the two-wire RY circuit")

    parser = argparse.ArgumentParser(description="QCNN experiment runner")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("train", "train a model and write checkpoint, metrics and manifest"),
        ("eval", "evaluate a checkpoint on the test split"),
        ("gradcheck", "parameter-shift vs finite-difference gradients"),
        ("inspect", "print the circuit listing and parameter count"),
        ("compare", "train full, reference and classical models side by side"),
        ("ingest", "print class counts of the IDX files"),
    ):
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    config_file = args.pop("config", None)
    try:
        cfg = load_run_config(args, config_file, manifest=args.get("manifest"))
        if cfg.command != "inspect":
            print_banner(cfg.command)
        os.makedirs(cfg.out, exist_ok=True)
        set_log_file(os.path.join(cfg.out, LOG_NAME))
        return COMMANDS[cfg.command](cfg)

    except QCNNError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return e.exit_code

    except KeyboardInterrupt:
        print("\nProcess interrupted by user")
        return 1

    except Exception as e:
        print(f"\nSYSTEM ERROR: {e}")
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
