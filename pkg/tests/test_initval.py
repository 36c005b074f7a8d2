import math

import numpy as np
import pytest

from lavrentiev.experiment import ProblemSpec, fit_slope, generate_data
from lavrentiev.grid import GridFunction, sup_norm
from lavrentiev.initval import (NoiseModel, clip_nonneg, estimate_x0_l2, estimate_x0_sup,
                                l2_window, reference_element)


def test_clip(fine):
    y = GridFunction.from_callable(fine, lambda t: t)
    assert np.array_equal(clip_nonneg(y).values, y.values)
    assert np.all(clip_nonneg(GridFunction.constant(fine, -1.0)).values == 0.0)
    half = GridFunction.from_callable(fine, lambda t: t - 0.5)
    assert np.array_equal(clip_nonneg(half).values, np.maximum(fine.nodes - 0.5, 0))


def test_clip_never_increases_distance(fine, rng):
    y0 = GridFunction.from_callable(fine, lambda t: t ** 2)
    noisy = y0 + GridFunction(fine, 0.3 * rng.uniform(-1, 1, fine.n_cells + 1))
    assert sup_norm(clip_nonneg(noisy) - y0) <= sup_norm(noisy - y0)


def test_sup_estimate_exact_constant(fine):
    y0 = GridFunction.from_callable(fine, lambda t: 4 * t)
    assert abs(estimate_x0_sup(y0, 0.01, 100) - 2.0) <= 0.85


def test_sup_estimate_negative(fine):
    assert estimate_x0_sup(GridFunction.constant(fine, -1.0), 0.01, 100) == 0.0


def test_sup_estimate_precondition(fine):
    with pytest.raises(ValueError):
        estimate_x0_sup(GridFunction.constant(fine, 1.0), 0.01, 50)
    with pytest.raises(ValueError):
        estimate_x0_sup(GridFunction.constant(fine, 1.0), 0.0, 50)


@pytest.mark.parametrize("delta", [0.04, 0.0025])
def test_sup_estimate_f1_noisy(delta):
    _, _, yd = generate_data(ProblemSpec("f1", 5000, NoiseModel("sup", delta, 7)))
    est = estimate_x0_sup(yd, delta, math.ceil(round(1 / delta, 9)))
    assert abs(est - 2.0) <= 4.25 * math.sqrt(delta)


def test_l2_window_formula():
    h, clamped = l2_window(1e-5, 2.0)
    assert not clamped
    assert h == pytest.approx((8 / 3) ** -0.4 * 1e-2, rel=1e-12)
    assert h == pytest.approx(0.006754, abs=1e-6)
    assert l2_window(1.0, 0.1) == (1.0, True)


def test_l2_estimate(fine):
    y0 = GridFunction.from_callable(fine, lambda t: 4 * t)
    assert abs(estimate_x0_l2(y0, 0.01, 2.0) - 2.0) <= 0.5
    assert estimate_x0_l2(GridFunction.constant(fine, 0.0), 0.01, 2.0) == 0.0


def test_l2_rate():
    deltas = [0.04, 0.01, 0.0025, 0.001]
    errs = []
    for d in deltas:
        e = [abs(estimate_x0_l2(generate_data(ProblemSpec("f1", 5000, NoiseModel("l2", d, s)))[2],
                                d, 2.0) - 2.0) for s in range(3)]
        errs.append(np.mean(e))
    assert fit_slope(deltas, errs) >= 0.35


def test_reference_element(fine):
    y0 = GridFunction.from_callable(fine, lambda t: 4 * t)
    xs = reference_element(y0, NoiseModel("sup", 0.01), 100)
    assert xs.values.max() - xs.values.min() == 0.0
    assert abs(xs.values[0] - 2.0) <= 0.85
    neg = reference_element(GridFunction.constant(fine, -1.0), NoiseModel("sup", 0.01), 100)
    assert np.all(neg.values == 0.0)
    l2 = reference_element(y0, NoiseModel("l2", 0.01, smoothness_bound=2.0), 100)
    assert abs(l2.values[0] - 2.0) <= 0.5
    with pytest.raises(ValueError):
        reference_element(y0, NoiseModel("l2", 0.01), 100)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel("sup", 1.5)
    with pytest.raises(ValueError):
        NoiseModel("cauchy", 0.1)
