"""Image-to-feature pipeline for MNIST-format data.

Each 28x28 digit becomes a 3-D piecewise-linear path (row, column, intensity)
over [0, 783]; rows of the feature matrix are flattened truncated discrete
fractional signatures, standardized with train-split statistics.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .discrete import execute_plan, get_plan
from .path import PiecewiseLinearPath
from .words import word_column_names

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
IMAGE_SIDE = 28
IMAGE_PIXELS = IMAGE_SIDE * IMAGE_SIDE

#: level guard: 3^8 coefficient rows per image get expensive fast
MAX_FEATURE_LEVEL = 7

#: rough per-batch working-set budget for the batched executor, in floats
_BATCH_BUDGET = 40_000_000


class IdxFormatError(ValueError):
    """An IDX file failed structural validation; the message names the offset."""


def _read_be32(data: bytes, offset: int, path: Path) -> int:
    if offset + 4 > len(data):
        raise IdxFormatError(f"{path}: truncated header at offset {offset}")
    return struct.unpack_from(">i", data, offset)[0]


def load_idx(images_file, labels_file) -> tuple[np.ndarray, np.ndarray]:
    """Parse an IDX image/label file pair into (images, labels) arrays.

    Images come back as (count, 784) uint8 rows (row-major pixels), labels as
    a (count,) uint8 vector. Structural problems raise IdxFormatError naming
    the byte offset.
    """
    images_path, labels_path = Path(images_file), Path(labels_file)
    raw = images_path.read_bytes()
    magic = _read_be32(raw, 0, images_path)
    if magic != IMAGE_MAGIC:
        raise IdxFormatError(
            f"{images_path}: bad image magic {magic} at offset 0 (expected {IMAGE_MAGIC})"
        )
    count = _read_be32(raw, 4, images_path)
    rows = _read_be32(raw, 8, images_path)
    cols = _read_be32(raw, 12, images_path)
    if (rows, cols) != (IMAGE_SIDE, IMAGE_SIDE):
        raise IdxFormatError(f"{images_path}: image shape {rows}x{cols} at offset 8 is not 28x28")
    expected = 16 + count * IMAGE_PIXELS
    if len(raw) < expected:
        raise IdxFormatError(
            f"{images_path}: payload ends at offset {len(raw)}, expected {expected} bytes"
        )
    images = np.frombuffer(raw, dtype=np.uint8, count=count * IMAGE_PIXELS, offset=16)
    images = images.reshape(count, IMAGE_PIXELS)

    raw_l = labels_path.read_bytes()
    magic_l = _read_be32(raw_l, 0, labels_path)
    if magic_l != LABEL_MAGIC:
        raise IdxFormatError(
            f"{labels_path}: bad label magic {magic_l} at offset 0 (expected {LABEL_MAGIC})"
        )
    count_l = _read_be32(raw_l, 4, labels_path)
    if count_l != count:
        raise IdxFormatError(
            f"{labels_path}: label count {count_l} at offset 4 does not match image count {count}"
        )
    if len(raw_l) < 8 + count_l:
        raise IdxFormatError(
            f"{labels_path}: payload ends at offset {len(raw_l)}, expected {8 + count_l} bytes"
        )
    labels = np.frombuffer(raw_l, dtype=np.uint8, count=count_l, offset=8)
    return images, labels


def embed_digit(image: np.ndarray) -> PiecewiseLinearPath:
    """Embed pixel i at knot (i div 28, i mod 28, intensity_i), i = 0..783."""
    knots = _embedding_knots(np.asarray(image).reshape(1, IMAGE_PIXELS))[0]
    return PiecewiseLinearPath(knots)


def _embedding_knots(images: np.ndarray) -> np.ndarray:
    """(count, 784) pixel rows -> (count, 784, 3) knot stacks, raw 0-255 values."""
    if images.ndim != 2 or images.shape[1] != IMAGE_PIXELS:
        raise ValueError(f"expected (count, {IMAGE_PIXELS}) pixel rows, got {images.shape}")
    if images.dtype != np.uint8:
        arr = np.asarray(images)
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("pixel intensities must lie in [0, 255]")
    count = images.shape[0]
    idx = np.arange(IMAGE_PIXELS)
    knots = np.empty((count, IMAGE_PIXELS, 3))
    knots[:, :, 0] = idx // IMAGE_SIDE
    knots[:, :, 1] = idx % IMAGE_SIDE
    knots[:, :, 2] = images
    return knots


@dataclass
class FeatureMatrix:
    """Signature feature rows with labels and canonical column names."""

    values: np.ndarray
    labels: np.ndarray
    columns: list[str]

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        if self.values.shape[0] != self.labels.shape[0]:
            raise ValueError("row count does not match label count")
        if self.values.shape[1] != len(self.columns):
            raise ValueError("column count does not match column names")


@dataclass(frozen=True)
class StandardizationStats:
    """Train-split column means and population standard deviations."""

    mean: np.ndarray
    std: np.ndarray


def extract_features(images: np.ndarray, labels: np.ndarray, alpha, level: int,
                     override_level_guard: bool = False) -> FeatureMatrix:
    """Discrete fractional signature rows for a stack of (count, 784) images.

    Columns follow the canonical word order for d = 3 with the level-0
    constant excluded; rows keep the input order regardless of internal
    batching.
    """
    if level > MAX_FEATURE_LEVEL and not override_level_guard:
        raise ValueError(
            f"level {level} exceeds the cost guard {MAX_FEATURE_LEVEL}; "
            "pass override_level_guard=True to force it"
        )
    images = np.asarray(images)
    labels = np.asarray(labels)
    count = images.shape[0]
    columns = word_column_names(3, level)
    if count == 0:
        return FeatureMatrix(np.zeros((0, len(columns))), labels.copy(), columns)
    knots = _embedding_knots(images)
    plan = get_plan(IMAGE_PIXELS - 1, float(alpha), level)
    width = sum(3**k for k in range(1, level + 1))
    per_row = (IMAGE_PIXELS - 1 + plan.peak_live) * width
    batch = int(np.clip(_BATCH_BUDGET // max(per_row, 1), 1, 256))
    out = np.empty((count, width))
    for start in range(0, count, batch):
        stop = min(start + batch, count)
        slopes = np.diff(knots[start:stop], axis=1)
        levels = execute_plan(plan, slopes)
        out[start:stop] = np.concatenate(levels[1:], axis=-1)
    return FeatureMatrix(out, labels.copy(), columns)


#: columns whose deviation is this small relative to their mean are constant
#: up to round-off and stay unscaled (a raw z-score would divide by noise)
_ZERO_VARIANCE_REL = 1e-12


def standardize(train: FeatureMatrix, test: FeatureMatrix) -> tuple[FeatureMatrix, FeatureMatrix, StandardizationStats]:
    """Z-score both splits with train-fit mean and population deviation.

    Zero-variance columns are centered but left unscaled so blank-border
    artifacts cannot blow up.
    """
    if train.columns != test.columns:
        raise ValueError("train and test feature columns do not match")
    mean = train.values.mean(axis=0)
    std = train.values.std(axis=0)
    effective = std > _ZERO_VARIANCE_REL * (1.0 + np.abs(mean))
    scale = np.where(effective, std, 1.0)
    stats = StandardizationStats(mean, std)
    train_z = FeatureMatrix((train.values - mean) / scale, train.labels.copy(), train.columns)
    test_z = FeatureMatrix((test.values - mean) / scale, test.labels.copy(), test.columns)
    return train_z, test_z, stats


def export_features(matrix: FeatureMatrix, stats: StandardizationStats | None, path_out) -> None:
    """Write the feature CSV plus a ``.stats`` sidecar of means and deviations.

    Floats are rendered with repr (shortest round-trip), so identical inputs
    produce byte-identical files.
    """
    out = Path(path_out)
    try:
        with out.open("w", encoding="ascii") as fh:
            fh.write(",".join(["label"] + matrix.columns) + "\n")
            for label, row in zip(matrix.labels, matrix.values):
                fh.write(",".join([str(int(label))] + [repr(float(v)) for v in row]) + "\n")
        if stats is not None:
            side = out.with_suffix(".stats")
            with side.open("w", encoding="ascii") as fh:
                fh.write(",".join(repr(float(v)) for v in stats.mean) + "\n")
                fh.write(",".join(repr(float(v)) for v in stats.std) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing features to {out}: {exc}") from exc


def load_features(path_in) -> FeatureMatrix:
    """Read back a feature CSV written by :func:`export_features`."""
    src = Path(path_in)
    with src.open("r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("label"):
            raise ValueError(f"{src}: missing feature header")
        columns = header.split(",")[1:]
        labels = []
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            labels.append(int(parts[0]))
            rows.append([float(v) for v in parts[1:]])
    values = np.array(rows) if rows else np.zeros((0, len(columns)))
    return FeatureMatrix(values, np.array(labels, dtype=np.int64), columns)
