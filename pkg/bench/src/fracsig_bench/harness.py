"""Train/evaluate gradient-boosted trees on exported signature feature CSVs.

Consumes the feature pipeline's CSV format (``label,s_1,...``) and optional
``.stats`` sidecars; reports per-alpha accuracy tables for the sweep
comparisons. The classifier is scikit-learn's HistGradientBoostingClassifier
with library defaults and a pinned seed.
"""

from __future__ import annotations

import csv
import re
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.ensemble import HistGradientBoostingClassifier


class DataError(ValueError):
    """Input files are missing or structurally inconsistent."""


@dataclass(frozen=True)
class BenchResult:
    """Accuracy of one (alpha, level) configuration."""

    alpha: float
    level: int
    train_size: int
    test_size: int
    accuracy: float
    wall_time_s: float

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy {self.accuracy} outside [0, 1]")


def load_feature_csv(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Read a feature CSV into (X, y, column_names)."""
    src = Path(path)
    if not src.exists():
        raise DataError(f"feature file not found: {src}")
    with src.open("r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{src}: empty file")
        if not header or header[0] != "label":
            raise DataError(f"{src}: expected a 'label,s_...' header")
        columns = header[1:]
        labels = []
        rows = []
        for line_no, parts in enumerate(reader, 2):
            if not parts:
                continue
            if len(parts) != len(columns) + 1:
                raise DataError(f"{src}:{line_no}: expected {len(columns) + 1} fields, got {len(parts)}")
            labels.append(int(parts[0]))
            rows.append([float(v) for v in parts[1:]])
    if not rows:
        raise DataError(f"{src}: no data rows")
    return np.asarray(rows), np.asarray(labels), columns


def level_of_columns(columns: list[str]) -> int:
    """Truncation level implied by the canonical column names."""
    if not columns:
        raise DataError("feature file has no signature columns")
    return max(len(name.split("_")) - 1 for name in columns)


def train_eval(train_csv, test_csv, seed: int = 0, alpha: float = float("nan")) -> BenchResult:
    """Fit the boosted-tree classifier on train features, score on test."""
    x_train, y_train, cols_train = load_feature_csv(train_csv)
    x_test, y_test, cols_test = load_feature_csv(test_csv)
    if cols_train != cols_test:
        raise DataError(
            f"column mismatch between {train_csv} ({len(cols_train)} cols) "
            f"and {test_csv} ({len(cols_test)} cols)"
        )
    start = time.perf_counter()
    model = HistGradientBoostingClassifier(random_state=seed)
    model.fit(x_train, y_train)
    accuracy = float(model.score(x_test, y_test))
    elapsed = time.perf_counter() - start
    return BenchResult(
        alpha=alpha,
        level=level_of_columns(cols_train),
        train_size=x_train.shape[0],
        test_size=x_test.shape[0],
        accuracy=accuracy,
        wall_time_s=elapsed,
    )


_ALPHA_FILE = re.compile(r"_alpha_([0-9.]+)\.csv$")


def discover_sweep(feature_dir) -> dict[float, dict[str, Path]]:
    """Map alpha -> {train: path, test: path} from a sweep output directory."""
    root = Path(feature_dir)
    if not root.is_dir():
        raise DataError(f"not a directory: {root}")
    found: dict[float, dict[str, Path]] = {}
    for path in sorted(root.glob("*.csv")):
        match = _ALPHA_FILE.search(path.name)
        if not match:
            continue
        alpha = float(match.group(1))
        stem = path.name.lower()
        role = "train" if "train" in stem else "test" if "test" in stem else None
        if role:
            found.setdefault(alpha, {})[role] = path
    if not found:
        raise DataError(f"no *_alpha_*.csv sweep files in {root}")
    return found


def sweep_report(feature_dir, out_csv, seed: int = 0) -> list[BenchResult]:
    """One accuracy row per alpha in the sweep directory, sorted ascending.

    Alphas with a missing test file become error rows and the run continues.
    The header records whether the pipeline exported standardization stats, so
    reports are self-describing about preprocessing.
    """
    sweep = discover_sweep(feature_dir)
    results: list[BenchResult] = []
    lines: list[str] = []
    stats_seen = any(p.with_suffix(".stats").exists()
                     for pair in sweep.values() for p in pair.values())
    for alpha in sorted(sweep):
        pair = sweep[alpha]
        if "train" not in pair or "test" not in pair:
            missing = "test" if "train" in pair else "train"
            lines.append(f"{alpha:g},,,,,missing {missing} split")
            continue
        res = train_eval(pair["train"], pair["test"], seed=seed, alpha=alpha)
        results.append(res)
        lines.append(
            f"{res.alpha:g},{res.level},{res.train_size},{res.test_size},"
            f"{res.accuracy!r},{res.wall_time_s:.3f}"
        )
    out = Path(out_csv)
    header = [
        f"# standardization: {'train-fit z-score stats exported by pipeline' if stats_seen else 'unknown (no .stats sidecars found)'}",
        f"# seed: {seed}",
        "alpha,level,train_size,test_size,accuracy,wall_time_s",
    ]
    out.write_text("\n".join(header + lines) + "\n")
    return results
