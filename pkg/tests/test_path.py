import numpy as np
import pytest

from fracsig import PiecewiseLinearPath, evaluate, segment_slope, time_dilate, translate


class TestConstruction:
    def test_rejects_single_knot(self):
        with pytest.raises(ValueError):
            PiecewiseLinearPath(np.zeros((1, 2)))

    def test_rejects_non_matrix(self):
        with pytest.raises(ValueError):
            PiecewiseLinearPath(np.zeros(5))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PiecewiseLinearPath(np.array([[0.0], [np.inf]]))


class TestEvaluate:
    def test_midpoint(self):
        p = PiecewiseLinearPath(np.array([[0.0], [2.0]]))
        assert evaluate(p, 0.5)[0] == pytest.approx(1.0)

    def test_knot_times_exact(self):
        p = PiecewiseLinearPath(np.array([[0.0, 1.0], [2.0, -1.0], [3.0, 5.0]]))
        for i in range(3):
            assert np.array_equal(evaluate(p, float(i)), p.knots[i])

    def test_interior_2d(self):
        p = PiecewiseLinearPath(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
        assert np.allclose(evaluate(p, 1.5), [1.0, 0.5])

    @pytest.mark.parametrize("t", [-0.1, 2.5])
    def test_domain_error(self, t):
        p = PiecewiseLinearPath(np.array([[0.0], [1.0], [2.0]]))
        with pytest.raises(ValueError):
            evaluate(p, t)


class TestSegmentSlope:
    def test_values(self):
        p = PiecewiseLinearPath(np.array([[0.0], [3.0]]))
        assert segment_slope(p, 0)[0] == pytest.approx(3.0)

    def test_constant_path(self):
        p = PiecewiseLinearPath(np.array([[1.0, 2.0], [1.0, 2.0]]))
        assert np.array_equal(segment_slope(p, 0), [0.0, 0.0])

    def test_repeated_knot(self):
        p = PiecewiseLinearPath(np.array([[0.0, 0.0], [1.0, 2.0], [1.0, 2.0]]))
        assert np.array_equal(segment_slope(p, 1), [0.0, 0.0])

    def test_index_error(self):
        p = PiecewiseLinearPath(np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            segment_slope(p, 1)


class TestTranslate:
    def test_zero_is_identity(self):
        p = PiecewiseLinearPath(np.array([[0.0, 1.0], [2.0, 3.0]]))
        assert np.array_equal(translate(p, np.zeros(2)).knots, p.knots)

    def test_scalar_shift(self):
        p = PiecewiseLinearPath(np.array([[0.0], [1.0]]))
        assert np.array_equal(translate(p, np.array([5.0])).knots, [[5.0], [6.0]])

    def test_componentwise(self):
        p = PiecewiseLinearPath(np.array([[0.0, 1.0], [1.0, 1.0]]))
        shifted = translate(p, np.array([2.0, -1.0]))
        assert np.array_equal(shifted.knots, [[2.0, 0.0], [3.0, 0.0]])

    def test_dimension_mismatch(self):
        p = PiecewiseLinearPath(np.array([[0.0, 1.0], [1.0, 1.0]]))
        with pytest.raises(ValueError):
            translate(p, np.zeros(3))


class TestTimeDilate:
    def test_unit_segment_halved(self):
        p = PiecewiseLinearPath(np.array([[0.0], [1.0]]))
        assert np.allclose(time_dilate(p, 2).knots, [[0.0], [0.5], [1.0]])

    def test_factor_one_unchanged(self):
        p = PiecewiseLinearPath(np.array([[0.0], [2.0]]))
        assert time_dilate(p, 1) is p

    def test_factor_four(self):
        p = PiecewiseLinearPath(np.array([[0.0], [2.0]]))
        assert np.allclose(time_dilate(p, 4).knots, [[0.0], [0.5], [1.0], [1.5], [2.0]])

    def test_factor_zero_error(self):
        p = PiecewiseLinearPath(np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            time_dilate(p, 0)

    def test_preserves_evaluation(self):
        p = PiecewiseLinearPath(np.array([[0.0, 0.0], [1.0, 2.0], [0.5, 3.0]]))
        dilated = time_dilate(p, 3)
        assert dilated.n_knots == 3 * 2 + 1
        for t in np.linspace(0.0, 2.0, 9):
            assert np.allclose(evaluate(dilated, 3 * t), evaluate(p, t), atol=1e-15)
