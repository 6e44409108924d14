"""Benchmark harness for signature feature CSVs."""

from .harness import BenchResult, DataError, load_feature_csv, sweep_report, train_eval

__all__ = ["BenchResult", "DataError", "load_feature_csv", "sweep_report", "train_eval"]
