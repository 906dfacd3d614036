"""
IDX Dataset Ingest
Reads MNIST / fashion-MNIST IDX containers, rescales 28x28 images to 16x16
by box averaging, selects a 4-class subset and remaps its labels.

IDX layout (big-endian):
    images: u32 magic 0x00000803 | u32 count | u32 rows | u32 cols | u8 pixels (row-major)
    labels: u32 magic 0x00000801 | u32 count | u8 labels
"""

import gzip
import os
import struct
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.data.encoding import EncodedImage, normalize_vector
from src.utils.errors import FormatError, InvalidInputError

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
SOURCE_SIDE = 28
TARGET_SIDE = 16
IMAGE_HEADER = 16
LABEL_HEADER = 8

# Published per-class counts of the standard splits
PUBLISHED_COUNTS = {
    ("mnist", "train"): {0: 5923, 1: 6742, 2: 5958, 3: 6132, 4: 5842, 5: 5421, 6: 5918},
    ("mnist", "test"): {0: 980, 1: 1135, 2: 1032, 3: 1010, 4: 982, 5: 892, 6: 958},
    ("fashion", "train"): {0: 6000, 1: 6000, 2: 6000, 3: 6000, 8: 6000, 9: 6000},
    ("fashion", "test"): {0: 1000, 1: 1000, 2: 1000, 3: 1000, 8: 1000, 9: 1000},
}

STANDARD_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


@dataclass(frozen=True)
class RawImage:
    """28x28 uint8 grid and its original 0..9 label."""
    pixels: np.ndarray
    label: int


@dataclass(frozen=True)
class BaselineSample:
    """28x28 image scaled to [0, 1] for the classical baseline."""
    pixels: np.ndarray
    label: int
    source_id: int = -1


class ClassSubsetSpec(BaseModel):
    """Ordered class list; position in the list is the remapped label."""
    model_config = ConfigDict(frozen=True)

    classes: Tuple[int, int, int, int]

    @field_validator("classes")
    @classmethod
    def _distinct_digits(cls, value):
        if len(set(value)) != 4:
            raise ValueError(f"classes must be 4 distinct labels, got {value}")
        if any(not 0 <= c <= 9 for c in value):
            raise ValueError(f"classes must be in 0..9, got {value}")
        return value

    @classmethod
    def parse(cls, text: str) -> "ClassSubsetSpec":
        return cls(classes=tuple(int(part) for part in text.split(",")))

    def __str__(self) -> str:
        return ",".join(map(str, self.classes))


def _read_bytes(path: str) -> bytes:
    if not os.path.isfile(path):
        raise InvalidInputError(f"dataset file not found: {path}")
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as f:
        return f.read()


def _header(data: bytes, fields: int, path: str) -> Tuple[int, ...]:
    size = 4 * fields
    if len(data) < size:
        raise FormatError(f"truncated header: {len(data)} bytes, expected {size}", path, len(data))
    return struct.unpack(f">{fields}I", data[:size])


def load_idx(images_path: str, labels_path: str) -> List[RawImage]:
    """
    Parse a pair of IDX files into records paired by index.

    Raises:
        InvalidInputError: a file is missing
        FormatError: bad magic, dimensions, truncation, count mismatch or label range
    """
    image_bytes = _read_bytes(images_path)
    label_bytes = _read_bytes(labels_path)

    magic, count, rows, cols = _header(image_bytes, 4, images_path)
    if magic != IMAGE_MAGIC:
        raise FormatError(f"bad image magic 0x{magic:08x}", images_path, 0)
    if rows != SOURCE_SIDE:
        raise FormatError(f"expected {SOURCE_SIDE} rows, got {rows}", images_path, 8)
    if cols != SOURCE_SIDE:
        raise FormatError(f"expected {SOURCE_SIDE} columns, got {cols}", images_path, 12)
    expected = IMAGE_HEADER + count * rows * cols
    if len(image_bytes) < expected:
        raise FormatError(f"truncated pixel data: {len(image_bytes)} of {expected} bytes",
                          images_path, len(image_bytes))

    label_magic, label_count = _header(label_bytes, 2, labels_path)
    if label_magic != LABEL_MAGIC:
        raise FormatError(f"bad label magic 0x{label_magic:08x}", labels_path, 0)
    if label_count != count:
        raise FormatError(f"label count {label_count} != image count {count}", labels_path, 4)
    if len(label_bytes) < LABEL_HEADER + count:
        raise FormatError(f"truncated label data: {len(label_bytes)} of {LABEL_HEADER + count} bytes",
                          labels_path, len(label_bytes))

    pixels = np.frombuffer(image_bytes, dtype=np.uint8, count=count * rows * cols, offset=IMAGE_HEADER)
    pixels = pixels.reshape(count, rows, cols)
    labels = np.frombuffer(label_bytes, dtype=np.uint8, count=count, offset=LABEL_HEADER)
    bad = np.nonzero(labels > 9)[0]
    if bad.size:
        first = int(bad[0])
        raise FormatError(f"label {int(labels[first])} out of range 0..9", labels_path, LABEL_HEADER + first)

    return [RawImage(pixels[i], int(labels[i])) for i in range(count)]


def save_idx(images_path: str, labels_path: str, images: np.ndarray, labels: Sequence[int]) -> None:
    """Write images (N, 28, 28) uint8 and labels as an IDX pair."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(images_path, "wb") as f:
        f.write(struct.pack(">4I", IMAGE_MAGIC, count, rows, cols))
        f.write(images.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">2I", LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())


def count_by_class(records: Sequence[RawImage]) -> Dict[int, int]:
    return dict(sorted(Counter(r.label for r in records).items()))


def compare_with_published(counts: Dict[int, int], dataset: str, split: str) -> Dict[int, Tuple[int, int]]:
    """Classes whose count differs from the published table: label -> (observed, published)."""
    published = PUBLISHED_COUNTS.get((dataset, split), {})
    return {
        label: (counts.get(label, 0), expected)
        for label, expected in published.items()
        if counts.get(label, 0) != expected
    }


def box_weights(source: int = SOURCE_SIDE, target: int = TARGET_SIDE) -> np.ndarray:
    """
    (target, source) area-averaging matrix.

    Entry (i, j) is the overlap of source cell [j, j+1) with the target cell
    [i*s, (i+1)*s), s = source/target, divided by s. Rows sum to 1.
    """
    scale = source / target
    weights = np.zeros((target, source), dtype=np.float64)
    for i in range(target):
        start, stop = i * scale, (i + 1) * scale
        for j in range(int(np.floor(start)), min(source, int(np.ceil(stop)))):
            overlap = min(stop, j + 1) - max(start, j)
            if overlap > 0:
                weights[i, j] = overlap / scale
    return weights


_BOX_WEIGHTS = box_weights()


def rescale_16(img: RawImage) -> np.ndarray:
    """16x16 box-resampled grid with values in [0, 255]."""
    grid = np.asarray(img.pixels, dtype=np.float64)
    if grid.shape != (SOURCE_SIDE, SOURCE_SIDE):
        raise InvalidInputError(f"expected a {SOURCE_SIDE}x{SOURCE_SIDE} image, got {grid.shape}")
    return _BOX_WEIGHTS @ grid @ _BOX_WEIGHTS.T


def _select(records: Sequence[RawImage], subset: ClassSubsetSpec, limit_per_class: Optional[int]):
    present = {r.label for r in records}
    missing = [c for c in subset.classes if c not in present]
    if missing:
        raise InvalidInputError(f"classes {missing} are absent from the records")
    taken = Counter()
    for index, record in enumerate(records):
        if record.label not in subset.classes:
            continue
        if limit_per_class is not None and taken[record.label] >= limit_per_class:
            continue
        taken[record.label] += 1
        yield index, record, subset.classes.index(record.label)


def make_dataset(records: Sequence[RawImage], subset: ClassSubsetSpec,
                 limit_per_class: Optional[int] = None) -> List[EncodedImage]:
    """
    Filter to subset.classes in file order, remap labels, rescale, flatten
    row-major and normalize.

    Raises:
        InvalidInputError: a requested class is absent
    """
    return [
        EncodedImage(normalize_vector(rescale_16(record).reshape(-1)), label, index)
        for index, record, label in _select(records, subset, limit_per_class)
    ]


def make_baseline_dataset(records: Sequence[RawImage], subset: ClassSubsetSpec,
                          limit_per_class: Optional[int] = None) -> List[BaselineSample]:
    """Same selection as make_dataset, keeping 28x28 pixels scaled by 1/255."""
    return [
        BaselineSample(np.asarray(record.pixels, dtype=np.float64) / 255.0, label, index)
        for index, record, label in _select(records, subset, limit_per_class)
    ]


def resolve_paths(data_dir: str, dataset: str, split: str) -> Tuple[str, str]:
    """Standard IDX file names under data_dir (fashion files live in data_dir/fashion)."""
    base = os.path.join(data_dir, "fashion") if dataset == "fashion" else data_dir
    images, labels = STANDARD_FILES[split]
    resolved = []
    for name in (images, labels):
        path = os.path.join(base, name)
        if not os.path.exists(path) and os.path.exists(path + ".gz"):
            path += ".gz"
        resolved.append(path)
    return resolved[0], resolved[1]
