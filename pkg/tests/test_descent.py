import math

import numpy as np
import pytest

from robustmean.core import BucketMeans, DataSet, EstimatorConfig
from robustmean.datagen import DistributionSpec, sample_dataset
from robustmean.descent import descent, estimate_mean
from robustmean.errors import InsufficientSamples
from robustmean.inner_max import StepEstimate

from .oracles import descent_multiplier

CONFIG = EstimatorConfig()
MU = np.array([3.0, -4.0])


def exact_stub(Z, x, config, rng):
    diff = MU - x
    D = float(np.linalg.norm(diff))
    return StepEstimate(D, diff / D if D else np.zeros_like(x), 1.0, 1.0)


def scripted(distances):
    it = iter(distances)

    def step(Z, x, config, rng):
        return StepEstimate(next(it), np.array([1.0, 0.0]), 1.0, 1.0)
    return step


Z_DUMMY = BucketMeans(np.zeros((2, 2)))


class TestDescentLoop:
    def test_iteration_count(self):
        rep = descent(Z_DUMMY, [0.0, 0.0], CONFIG, step=scripted([5.0] * 100))
        assert len(rep.iterations) == math.ceil(4 * math.log2(3))

    def test_exact_stub_contracts(self):
        rep = descent(Z_DUMMY, [0.0, 0.0], CONFIG, step=exact_stub)
        errs = [np.linalg.norm(r.x_t - MU) for r in rep.iterations]
        for a, b in zip(errs, errs[1:]):
            assert (b / a) ** 2 == pytest.approx(descent_multiplier(CONFIG.eta, 1.0, 1.0), abs=1e-12)
        assert rep.chosen_iteration == len(errs) - 1

    def test_picks_first_minimum(self):
        T = math.ceil(4 * math.log2(3))
        ds = [5.0, 2.0, 3.0, 2.0] + [4.0] * (T - 4)
        rep = descent(Z_DUMMY, [0.0, 0.0], CONFIG, step=scripted(ds))
        assert rep.chosen_iteration == 1
        np.testing.assert_array_equal(rep.estimate, rep.iterations[1].x_t)
        assert rep.estimate[0] == pytest.approx(CONFIG.eta * 5.0)

    def test_early_stop(self):
        rep = descent(Z_DUMMY, [0.0, 0.0], CONFIG, step=scripted([1.0, 0.0, 7.0]))
        assert len(rep.iterations) == 2 and rep.chosen_iteration == 1

    def test_degenerate_buckets(self):
        Z = BucketMeans(np.ones((4, 2)))
        rep = descent(Z, [1.0, 1.0], CONFIG, seed=0)
        assert len(rep.iterations) == 1 and rep.iterations[0].degenerate
        np.testing.assert_array_equal(rep.estimate, [1.0, 1.0])

    def test_report_json_shape(self):
        rep = descent(Z_DUMMY, [0.0, 0.0], CONFIG, step=exact_stub)
        out = rep.to_dict()
        assert {"estimate", "initial_guess", "config", "iterations", "chosen_iteration", "timing"} <= set(out)
        assert out["iterations"][0]["t"] == 0


class TestEstimateMean:
    def test_constant_data(self):
        data = DataSet(np.full((40, 3), 2.5))
        rep = estimate_mean(data, CONFIG.replace(k_override=5))
        np.testing.assert_array_equal(rep.estimate, [2.5, 2.5, 2.5])

    def test_insufficient(self):
        with pytest.raises(InsufficientSamples):
            estimate_mean(DataSet(np.zeros((5, 2))), CONFIG.replace(k_override=3))

    def test_deterministic(self):
        data, _ = sample_dataset(DistributionSpec("student_t", (1.0,) * 4, 1.0, 3.0), 400, seed=1)
        cfg = CONFIG.replace(k_override=20, rng_seed=11)
        a, b = estimate_mean(data, cfg), estimate_mean(data, cfg)
        assert a.estimate.tobytes() == b.estimate.tobytes()

    def test_accuracy_gaussian(self):
        mu = (1.0, -1.0, 0.5, 2.0, 0.0)
        data, truth = sample_dataset(DistributionSpec("gaussian", mu), 2000, seed=2)
        rep = estimate_mean(data, CONFIG.replace(k_override=20))
        # r_delta-scale error: sqrt(d/n) + sqrt(ln(1/delta)/n) with ample constant
        assert np.linalg.norm(rep.estimate - mu) < 10 * (math.sqrt(5 / 2000) + math.sqrt(3 / 2000))
        assert rep.k == 20 and rep.k_pruned == 18 and len(rep.removed) == 2


def test_boundary_step_matches_closed_form():
    # distance D/21 with alignment 1/200: 1 - 2 eta (1/21)(1/200) + eta^2 / 441
    mu = np.array([7.0, -3.0])

    def step(Z, x, config, rng):
        diff = mu - x
        D = float(np.linalg.norm(diff))
        u = diff / D
        v = np.array([u[1], -u[0]])
        a = 1 / 200
        return StepEstimate(D / 21, a * u + np.sqrt(1 - a * a) * v, 1.0, 1.0)

    rep = descent(Z_DUMMY, [0.0, 0.0], CONFIG, step=step)
    sq = [float(np.sum((r.x_t - mu) ** 2)) for r in rep.iterations]
    expected = descent_multiplier(CONFIG.eta, 1 / 21, 1 / 200)
    for a, b in zip(sq, sq[1:]):
        assert b / a == pytest.approx(expected, abs=1e-12)
    assert expected < 1.0
