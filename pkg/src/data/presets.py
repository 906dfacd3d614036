"""
Experiment presets: the four dataset rows of the published comparison,
with the accuracies (percent) reported for each model.
"""

from typing import Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict

from src.utils.errors import ConfigurationError


class ExperimentPreset(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    dataset: Literal["mnist", "fashion"]
    classes: str
    published_reference: float
    published_full: float
    published_classical: float


PRESETS: Dict[str, ExperimentPreset] = {
    p.name: p
    for p in (
        ExperimentPreset(name="mnist-3456", dataset="mnist", classes="3,4,5,6",
                         published_reference=71.44, published_full=85.14, published_classical=94.25),
        ExperimentPreset(name="mnist-0123", dataset="mnist", classes="0,1,2,3",
                         published_reference=77.64, published_full=90.03, published_classical=95.85),
        ExperimentPreset(name="fashion-0123", dataset="fashion", classes="0,1,2,3",
                         published_reference=71.15, published_full=85.93, published_classical=89.69),
        ExperimentPreset(name="fashion-1289", dataset="fashion", classes="1,2,8,9",
                         published_reference=79.33, published_full=93.63, published_classical=97.42),
    )
}


def get_preset(name: str) -> ExperimentPreset:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset '{name}', choose from {sorted(PRESETS)}")
    return PRESETS[name]


def find_preset(dataset: str, classes: str) -> Optional[ExperimentPreset]:
    """Preset matching a dataset/classes pair, or None."""
    for preset in PRESETS.values():
        if preset.dataset == dataset and preset.classes == classes:
            return preset
    return None
