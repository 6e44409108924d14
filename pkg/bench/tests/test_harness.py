import numpy as np
import pytest

from conftest import gaussian_blob_features, write_feature_csv
from fracsig_bench import BenchResult, DataError, load_feature_csv, sweep_report, train_eval
from fracsig_bench.harness import discover_sweep, level_of_columns


class TestLoadFeatureCsv:
    def test_round_trip(self, tmp_path, rng):
        values, labels = gaussian_blob_features(rng, 20)
        path = write_feature_csv(tmp_path / "f.csv", values, labels)
        x, y, cols = load_feature_csv(path)
        assert np.allclose(x, values)
        assert np.array_equal(y, labels)
        assert len(cols) == 12

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_feature_csv(tmp_path / "nope.csv")

    def test_bad_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("foo,bar\n1,2\n")
        with pytest.raises(DataError, match="header"):
            load_feature_csv(bad)

    def test_ragged_row(self, tmp_path):
        bad = tmp_path / "ragged.csv"
        bad.write_text("label,s_1,s_2\n1,0.5,0.5\n2,0.5\n")
        with pytest.raises(DataError, match="fields"):
            load_feature_csv(bad)

    def test_no_rows(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("label,s_1\n")
        with pytest.raises(DataError, match="no data rows"):
            load_feature_csv(bad)


class TestLevelInference:
    def test_level_two(self):
        assert level_of_columns(["s_1", "s_2", "s_3", "s_1_1", "s_3_3"]) == 2

    def test_level_four_width(self, tmp_path, rng):
        values, labels = gaussian_blob_features(rng, 5, n_cols=120)
        path = write_feature_csv(tmp_path / "f.csv", values, labels)
        _, _, cols = load_feature_csv(path)
        assert level_of_columns(cols) == 4


class TestTrainEval:
    def test_memorization_floor(self, tmp_path, rng):
        values, labels = gaussian_blob_features(rng, 100)
        path = write_feature_csv(tmp_path / "f.csv", values, labels)
        res = train_eval(path, path, seed=0)
        assert res.accuracy >= 0.95
        assert res.train_size == res.test_size == 100

    def test_fixed_seed_reproducible(self, tmp_path, rng):
        values, labels = gaussian_blob_features(rng, 120)
        train = write_feature_csv(tmp_path / "train.csv", values[:80], labels[:80])
        test = write_feature_csv(tmp_path / "test.csv", values[80:], labels[80:])
        first = train_eval(train, test, seed=7)
        second = train_eval(train, test, seed=7)
        assert first.accuracy == second.accuracy

    def test_shuffled_labels_near_chance(self, tmp_path, rng):
        values, labels = gaussian_blob_features(rng, 400)
        shuffled = labels.copy()
        rng.shuffle(shuffled)
        train = write_feature_csv(tmp_path / "train.csv", values[:300], shuffled[:300])
        test = write_feature_csv(tmp_path / "test.csv", values[300:], labels[300:])
        res = train_eval(train, test, seed=0)
        assert abs(res.accuracy - 0.10) <= 0.05

    def test_column_mismatch(self, tmp_path, rng):
        values, labels = gaussian_blob_features(rng, 30)
        train = write_feature_csv(tmp_path / "train.csv", values, labels)
        test = write_feature_csv(tmp_path / "test.csv", values[:, :3], labels)
        with pytest.raises(DataError, match="mismatch"):
            train_eval(train, test)

    def test_accuracy_bounds_enforced(self):
        with pytest.raises(ValueError):
            BenchResult(1.0, 4, 10, 10, 1.5, 0.0)


class TestSweepReport:
    def _sweep_dir(self, tmp_path, rng, alphas=("1", "1.15")):
        values, labels = gaussian_blob_features(rng, 80)
        for alpha in alphas:
            write_feature_csv(tmp_path / f"train_alpha_{alpha}.csv", values[:60], labels[:60])
            write_feature_csv(tmp_path / f"test_alpha_{alpha}.csv", values[60:], labels[60:])
        return tmp_path

    def test_two_alpha_rows_sorted(self, tmp_path, rng):
        sweep_dir = self._sweep_dir(tmp_path, rng)
        out = tmp_path / "report.csv"
        results = sweep_report(sweep_dir, out, seed=0)
        assert [r.alpha for r in results] == [1.0, 1.15]
        lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert lines[0].startswith("alpha,level,")
        assert len(lines) == 3

    def test_missing_test_split_becomes_error_row(self, tmp_path, rng):
        sweep_dir = self._sweep_dir(tmp_path, rng, alphas=("1",))
        values, labels = gaussian_blob_features(rng, 20)
        write_feature_csv(tmp_path / "train_alpha_1.3.csv", values, labels)
        out = tmp_path / "report.csv"
        results = sweep_report(sweep_dir, out, seed=0)
        assert [r.alpha for r in results] == [1.0]
        text = out.read_text()
        assert "missing test" in text

    def test_empty_directory(self, tmp_path):
        with pytest.raises(DataError, match="sweep files"):
            discover_sweep(tmp_path)

    def test_header_records_standardization(self, tmp_path, rng):
        sweep_dir = self._sweep_dir(tmp_path, rng, alphas=("1",))
        (tmp_path / "train_alpha_1.stats").write_text("0.0\n1.0\n")
        out = tmp_path / "report.csv"
        sweep_report(sweep_dir, out, seed=0)
        assert "# standardization: train-fit" in out.read_text()
