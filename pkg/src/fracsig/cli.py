"""Command-line driver: signature computation, FDE verification, feature export.

Exit codes: 0 success, 1 usage error, 2 data or file-format error. Outputs
use repr float formatting, so identical configurations give byte-identical
files.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import features as feat
from .caputo import verification_battery
from .classical import signature
from .discrete import discrete_signature
from .fractional import fractional_signature
from .path import PiecewiseLinearPath
from .words import word_column_names

DATA_DIR_ENV = "FRACSIG_DATA_DIR"
DEFAULT_SWEEP = [round(0.80 + 0.05 * i, 2) for i in range(13)]  # 0.80 .. 1.40


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunConfig:
    """Validated settings for one CLI invocation."""

    subcommand: str
    alpha: float = 1.0
    level: int = 2
    kind: str = "classical"
    grid_n: int | None = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    alpha_sweep: list[float] | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise _UsageError(f"alpha must be positive, got {self.alpha}")
        if self.level < 1:
            raise _UsageError(f"level must be >= 1, got {self.level}")
        if self.kind == "fractional" and not self.grid_n:
            raise _UsageError("--kind fractional requires --grid-n")
        if self.jobs < 1:
            raise _UsageError(f"jobs must be >= 1, got {self.jobs}")
        if self.alpha_sweep is not None:
            if not self.alpha_sweep:
                raise _UsageError("alpha sweep list is empty")
            if any(a <= 0 for a in self.alpha_sweep):
                raise _UsageError("alpha sweep values must be positive")


def _build_parser() -> _Parser:
    parser = _Parser(prog="fracsig", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_sig = sub.add_parser("sig", help="signature of a path CSV")
    p_sig.add_argument("--config", type=Path, default=None, help="key=value defaults file")
    p_sig.add_argument("--kind", choices=["classical", "fractional", "discrete"], default="classical")
    p_sig.add_argument("--alpha", type=float, default=1.0)
    p_sig.add_argument("--level", type=int, default=2)
    p_sig.add_argument("--grid-n", type=int, default=None)
    p_sig.add_argument("--input", type=Path, required=True, help="knot CSV, one row per knot")
    p_sig.add_argument("--output", type=Path, default=None, help="default: stdout")

    p_mnist = sub.add_parser("mnist-features", help="IDX digit files to feature CSVs")
    p_mnist.add_argument("--config", type=Path, default=None)
    p_mnist.add_argument("--alpha", type=float, default=1.15)
    p_mnist.add_argument("--level", type=int, default=4)
    p_mnist.add_argument("--train-images", type=Path, required=True)
    p_mnist.add_argument("--train-labels", type=Path, required=True)
    p_mnist.add_argument("--test-images", type=Path, default=None)
    p_mnist.add_argument("--test-labels", type=Path, default=None)
    p_mnist.add_argument("--out-train", type=Path, required=True)
    p_mnist.add_argument("--out-test", type=Path, default=None)
    p_mnist.add_argument("--limit-train", type=int, default=None, help="use only the first K samples")
    p_mnist.add_argument("--limit-test", type=int, default=None)
    p_mnist.add_argument("--raw", action="store_true", help="skip standardization")
    p_mnist.add_argument("--jobs", type=int, default=1)
    p_mnist.add_argument(
        "--alpha-sweep", nargs="?", const="default", default=None,
        help="comma-separated alphas (or bare flag for 0.80..1.40 step 0.05); one output per alpha",
    )

    p_fde = sub.add_parser("verify-fde", help="print the solver-vs-expansion comparison table")
    p_fde.add_argument("--config", type=Path, default=None)
    p_fde.add_argument("--grid-n", type=int, default=2048)
    p_fde.add_argument("--iterates", type=int, default=4)
    p_fde.add_argument("--tolerance", type=float, default=1e-4)
    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Expand --config files into flag defaults (explicit flags still win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise _UsageError("--config needs a file argument")
    cfg_path = Path(argv[idx + 1])
    try:
        lines = cfg_path.read_text().splitlines()
    except OSError as exc:
        raise _DataError(f"cannot read config {cfg_path}: {exc}")
    injected: list[str] = []
    for ln, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _DataError(f"{cfg_path}:{ln}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        injected.extend([f"--{key.strip()}", value.strip()])
    head = argv[: idx]
    tail = argv[idx + 2 :]
    # defaults go right after the subcommand so later flags override them
    return [argv[0]] + injected + head[1:] + tail


class _DataError(Exception):
    pass


def _load_path_csv(path: Path) -> PiecewiseLinearPath:
    try:
        text = path.read_text()
    except OSError as exc:
        raise _DataError(f"cannot read {path}: {exc}")
    rows = []
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            if ln == 1:
                continue  # header row
            raise _DataError(f"{path}:{ln}: non-numeric knot entry")
    if not rows:
        raise _DataError(f"{path}: no knot rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise _DataError(f"{path}: inconsistent column counts {sorted(widths)}")
    try:
        return PiecewiseLinearPath(np.array(rows))
    except ValueError as exc:
        raise _DataError(f"{path}: {exc}")


def _resolve_data_path(p: Path | None) -> Path | None:
    if p is None:
        return None
    base = os.environ.get(DATA_DIR_ENV)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _run_sig(cfg: RunConfig) -> int:
    path = _load_path_csv(cfg.inputs["path"])
    if cfg.kind == "classical":
        sig = signature(path, cfg.level)
    elif cfg.kind == "discrete":
        sig = discrete_signature(path, cfg.alpha, cfg.level)
    else:
        try:
            sig = fractional_signature(path, cfg.alpha, cfg.level, cfg.grid_n)
        except ValueError as exc:
            raise _DataError(str(exc))
    names = word_column_names(path.dimension, cfg.level)
    header = ",".join(names)
    row = ",".join(repr(float(v)) for v in sig.flatten())
    text = header + "\n" + row + "\n"
    out = cfg.outputs.get("out")
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="ascii")
    return 0


def _extract_chunk(args) -> np.ndarray:
    images, labels, alpha, level = args
    return feat.extract_features(images, labels, alpha, level).values


def _extract(images: np.ndarray, labels: np.ndarray, alpha: float, level: int,
             jobs: int) -> feat.FeatureMatrix:
    if jobs <= 1 or images.shape[0] < 2 * jobs:
        return feat.extract_features(images, labels, alpha, level)
    bounds = np.linspace(0, images.shape[0], jobs + 1, dtype=int)
    chunks = [
        (images[lo:hi], labels[lo:hi], alpha, level)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_extract_chunk, chunks))
    return feat.FeatureMatrix(
        np.vstack(parts), labels.copy(), feat.word_column_names(3, level)
    )


def _sweep_suffix(out: Path, alpha: float) -> Path:
    return out.with_name(f"{out.stem}_alpha_{alpha:g}{out.suffix}")


def _run_mnist(cfg: RunConfig) -> int:
    train_images, train_labels = feat.load_idx(
        _resolve_data_path(cfg.inputs["train_images"]),
        _resolve_data_path(cfg.inputs["train_labels"]),
    )
    limit_train = cfg.inputs.get("limit_train")
    if limit_train:
        train_images, train_labels = train_images[:limit_train], train_labels[:limit_train]
    has_test = cfg.inputs.get("test_images") is not None
    if has_test and cfg.outputs.get("out_test") is None:
        raise _UsageError("--test-images requires --out-test")
    if has_test:
        test_images, test_labels = feat.load_idx(
            _resolve_data_path(cfg.inputs["test_images"]),
            _resolve_data_path(cfg.inputs["test_labels"]),
        )
        limit_test = cfg.inputs.get("limit_test")
        if limit_test:
            test_images, test_labels = test_images[:limit_test], test_labels[:limit_test]

    alphas = cfg.alpha_sweep if cfg.alpha_sweep is not None else [cfg.alpha]
    for alpha in alphas:
        train_fm = _extract(train_images, train_labels, alpha, cfg.level, cfg.jobs)
        test_fm = None
        if has_test:
            test_fm = _extract(test_images, test_labels, alpha, cfg.level, cfg.jobs)
        if cfg.inputs.get("raw") or test_fm is None:
            stats = feat.StandardizationStats(
                train_fm.values.mean(axis=0) if train_fm.values.size else np.zeros(len(train_fm.columns)),
                train_fm.values.std(axis=0) if train_fm.values.size else np.zeros(len(train_fm.columns)),
            )
            if not cfg.inputs.get("raw") and train_fm.values.size:
                train_fm, _, stats = feat.standardize(train_fm, train_fm)
        else:
            train_fm, test_fm, stats = feat.standardize(train_fm, test_fm)
        out_train = cfg.outputs["out_train"]
        out_test = cfg.outputs.get("out_test")
        if len(alphas) > 1:
            out_train = _sweep_suffix(out_train, alpha)
            out_test = _sweep_suffix(out_test, alpha) if out_test else None
        feat.export_features(train_fm, stats, out_train)
        if test_fm is not None and out_test is not None:
            feat.export_features(test_fm, stats, out_test)
    return 0


def _run_fde(cfg: RunConfig) -> int:
    tol = cfg.inputs["tolerance"]
    rows = verification_battery(grid_n=cfg.grid_n, n_iter=cfg.inputs["iterates"])
    print(f"{'alpha':>6} {'e':>2} {'d':>2} {'knots':>5} {'iters':>5} {'max rel err':>12}  status")
    ok = True
    for row in rows:
        status = "pass" if row.max_rel_err < tol else "FAIL"
        ok &= status == "pass"
        print(
            f"{row.alpha:6.2f} {row.e_dim:2d} {row.d_dim:2d} {row.n_knots:5d} "
            f"{row.n_iter:5d} {row.max_rel_err:12.3e}  {status}"
        )
    return 0 if ok else 2


def _parse_sweep(raw: str | None) -> list[float] | None:
    if raw is None:
        return None
    if raw == "default":
        return list(DEFAULT_SWEEP)
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise _UsageError(f"bad alpha sweep list: {raw!r}")


def run(argv: list[str]) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        argv = _apply_config(list(argv))
        ns = parser.parse_args(argv)
        if ns.subcommand == "sig":
            cfg = RunConfig(
                "sig", alpha=ns.alpha, level=ns.level, kind=ns.kind, grid_n=ns.grid_n,
                inputs={"path": ns.input}, outputs={"out": ns.output},
            )
            return _run_sig(cfg)
        if ns.subcommand == "mnist-features":
            cfg = RunConfig(
                "mnist-features", alpha=ns.alpha, level=ns.level, kind="discrete",
                inputs={
                    "train_images": ns.train_images, "train_labels": ns.train_labels,
                    "test_images": ns.test_images, "test_labels": ns.test_labels,
                    "limit_train": ns.limit_train, "limit_test": ns.limit_test,
                    "raw": ns.raw,
                },
                outputs={"out_train": ns.out_train, "out_test": ns.out_test},
                alpha_sweep=_parse_sweep(ns.alpha_sweep),
                jobs=ns.jobs,
            )
            return _run_mnist(cfg)
        cfg = RunConfig(
            "verify-fde", grid_n=ns.grid_n, kind="discrete",
            inputs={"iterates": ns.iterates, "tolerance": ns.tolerance},
        )
        return _run_fde(cfg)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (_DataError, feat.IdxFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
