"""
Report Generator
Summaries built from the experiment log and from finished runs: per-trainer
training report and the model comparison against a published row.
"""

import json
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from src.data.presets import ExperimentPreset

COMPARISON_FILE = "comparison.json"


class ReportGenerator:
    """
    Reads the experiment log of one output directory and writes reports next to it.
    """

    def __init__(self, log_file: str, report_dir: str):
        self.log_file = log_file
        self.report_dir = report_dir
        self.logs: List[Dict[str, Any]] = []
        os.makedirs(self.report_dir, exist_ok=True)
        self._load_logs()

    def _load_logs(self) -> bool:
        try:
            if os.path.exists(self.log_file):
                with open(self.log_file, "r", encoding="utf-8") as f:
                    data = json.load(f)
                    self.logs = data if isinstance(data, list) else [data]
                return True
            return False
        except json.JSONDecodeError as e:
            print(f"[REPORT] Could not read {self.log_file}: {e}")
            return False

    def generate_training_report(self) -> Dict[str, Any]:
        """Epoch count, last loss and best test accuracy per component."""
        report = {
            "timestamp": datetime.now().isoformat(),
            "report_type": "TRAINING",
            "components": {},
        }
        for log in self.logs:
            component = report["components"].setdefault(log.get("component", "UNKNOWN"), {
                "epochs": 0,
                "final_train_loss": None,
                "best_test_acc": None,
                "failures": 0,
            })
            if log.get("status") == "FAILURE":
                component["failures"] += 1
            details = log.get("details", {})
            if log.get("action") == "TRAIN_EPOCH":
                component["epochs"] += 1
                component["final_train_loss"] = details.get("train_loss")
            elif log.get("action") == "EVALUATION" and details.get("split") == "test":
                accuracy = details.get("accuracy")
                best = component["best_test_acc"]
                component["best_test_acc"] = accuracy if best is None else max(best, accuracy)
        return report

    def generate_comparison_report(self, results: Dict[str, Dict[str, Any]],
                                   preset: Optional[ExperimentPreset] = None) -> Dict[str, Any]:
        """
        One row per model: parameter count, final test accuracy (percent) and,
        when the run matches a preset, the published accuracy.

        Args:
            results: model name ("full", "reference", "classical") ->
                {"parameters": int, "history": [...]}
            preset: Published row for the same dataset and classes
        """
        published = {}
        if preset is not None:
            published = {
                "full": preset.published_full,
                "reference": preset.published_reference,
                "classical": preset.published_classical,
            }
        rows = []
        for name, result in results.items():
            history = result["history"]
            accuracy = 100.0 * history[-1]["test_acc"] if history else None
            rows.append({
                "model": name,
                "parameters": result["parameters"],
                "test_accuracy": accuracy,
                "published_accuracy": published.get(name),
            })
        return {
            "timestamp": datetime.now().isoformat(),
            "report_type": "COMPARISON",
            "preset": preset.name if preset else None,
            "rows": rows,
        }

    def save_all_reports(self, comparison: Optional[Dict[str, Any]] = None) -> Dict[str, str]:
        files = {}
        training_file = os.path.join(self.report_dir, "training_report.json")
        with open(training_file, "w", encoding="utf-8") as f:
            json.dump(self.generate_training_report(), f, indent=2)
        files["training"] = training_file
        if comparison is not None:
            comparison_file = os.path.join(self.report_dir, COMPARISON_FILE)
            with open(comparison_file, "w", encoding="utf-8") as f:
                json.dump(comparison, f, indent=2)
            files["comparison"] = comparison_file
        return files

    def print_summary(self, comparison: Dict[str, Any]):
        print("\n" + "=" * 60)
        print(f"[REPORT] COMPARISON{' - ' + comparison['preset'] if comparison['preset'] else ''}")
        print("=" * 60)
        print(f"{'model':<12}{'params':>8}{'test acc %':>14}{'published %':>14}")
        for row in comparison["rows"]:
            accuracy = "-" if row["test_accuracy"] is None else f"{row['test_accuracy']:.2f}"
            published = "-" if row["published_accuracy"] is None else f"{row['published_accuracy']:.2f}"
            print(f"{row['model']:<12}{row['parameters']:>8}{accuracy:>14}{published:>14}")
        print("=" * 60)
