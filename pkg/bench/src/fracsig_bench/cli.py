"""Benchmark CLI: score feature CSVs and build alpha-sweep accuracy tables.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import BenchResult, DataError, sweep_report, train_eval


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fracsig-bench", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_eval = sub.add_parser("train-eval", help="fit on train features, score on test")
    p_eval.add_argument("--train", type=Path, required=True)
    p_eval.add_argument("--test", type=Path, required=True)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--alpha", type=float, default=float("nan"),
                        help="annotation only; recorded in the output row")

    p_sweep = sub.add_parser("sweep", help="accuracy table over *_alpha_*.csv files")
    p_sweep.add_argument("--dir", type=Path, required=True)
    p_sweep.add_argument("--out", type=Path, required=True)
    p_sweep.add_argument("--seed", type=int, default=0)
    return parser


def _print_result(res: BenchResult) -> None:
    print(
        f"alpha={res.alpha:g} level={res.level} train={res.train_size} "
        f"test={res.test_size} accuracy={res.accuracy:.4f} time={res.wall_time_s:.1f}s"
    )


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.subcommand == "train-eval":
            _print_result(train_eval(ns.train, ns.test, seed=ns.seed, alpha=ns.alpha))
            return 0
        results = sweep_report(ns.dir, ns.out, seed=ns.seed)
        for res in results:
            _print_result(res)
        print(f"wrote {ns.out}")
        return 0
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
