import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustmean.baselines import empirical_mean, geometric_median, sum_of_distances, weiszfeld
from robustmean.core import BucketMeans, DataSet
from robustmean.errors import InvalidInput
from robustmean.fhp import fhp_iterations, fhp_mwu, fhp_regret_slack, fhp_solve
from robustmean.inner_max import planted_instance

from .oracles import fermat_point_grid


class TestEmpiricalMean:
    def test_compensated(self):
        X = np.array([[1e16], [1.0], [-1e16]])
        assert empirical_mean(DataSet(X))[0] == pytest.approx(1 / 3, abs=1e-15)

    def test_columns(self):
        np.testing.assert_allclose(empirical_mean(DataSet([[1.0, 2.0], [3.0, 6.0]])), [2.0, 4.0])


class TestGeometricMedian:
    def test_right_triangle_fermat_point(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        res = weiszfeld(BucketMeans(pts))
        _, best = fermat_point_grid(pts)
        assert res.objective == pytest.approx(best, abs=1e-4)
        assert res.objective == pytest.approx(math.sqrt(2 + math.sqrt(3)), abs=1e-4)

    def test_obtuse_vertex(self):
        # angle at the origin exceeds 120 degrees, so the median is that vertex
        pts = np.array([[0.0, 0.0], [1.0, 0.1], [-1.0, 0.1]])
        np.testing.assert_allclose(geometric_median(pts), [0.0, 0.0], atol=1e-6)

    def test_single_point(self):
        np.testing.assert_array_equal(geometric_median(np.array([[2.0, 3.0]])), [2.0, 3.0])

    def test_robust_to_outlier(self):
        pts = np.vstack([np.zeros((9, 2)) + [[1.0, 1.0]], [[1e6, 1e6]]])
        np.testing.assert_allclose(geometric_median(pts), [1.0, 1.0], atol=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_beats_mean_and_median_start(self, seed):
        pts = np.random.default_rng(seed).standard_t(2.5, size=(15, 3))
        y = geometric_median(pts)
        assert sum_of_distances(pts, y) <= sum_of_distances(pts, pts.mean(axis=0)) + 1e-9
        assert sum_of_distances(pts, y) <= sum_of_distances(pts, np.median(pts, axis=0)) + 1e-9


class TestFHP:
    def test_iterations(self):
        assert fhp_iterations(50, 0.3) == math.ceil(10 * math.log(50) / 0.09)

    def test_planted(self):
        rows, _, _ = planted_instance(50, 20, 0.3, seed=0)
        cert = fhp_solve(rows, 0.3, seed=1)
        assert cert is not None
        assert cert.satisfied_count >= 0.7 * 50
        assert cert.threshold == pytest.approx(0.03)

    def test_regret_bound_every_expert(self):
        rows, _, _ = planted_instance(20, 6, 0.3, seed=2)
        trace = fhp_mwu(rows, 200, seed=3)
        assert np.all(fhp_regret_slack(trace, 1 / 3) >= -1e-9)

    def test_weights_decrease_on_covered_rows(self):
        rows = np.array([[1.0, 0.0], [0.0, 0.1]])
        trace = fhp_mwu(rows, 3, seed=0)
        assert trace.weights[1, 0] < trace.weights[0, 0]

    def test_rejects_long_rows(self):
        with pytest.raises(InvalidInput):
            fhp_mwu(np.array([[2.0, 0.0]]), 5)

    def test_fail(self):
        rows = np.vstack([[1.0, 0.0], np.zeros((9, 2))])
        assert fhp_solve(rows, 0.5, seed=0, max_round_trials=5) is None
