import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lavrentiev.grid import (GridFunction, UniformGrid, apply_weight, cumulative_integral_at,
                             load_grid_function, random_smooth, sup_norm, weighted_inner,
                             weighted_norm, write_csv)


def const(grid, c):
    return GridFunction.constant(grid, c)


def test_grid_invariants():
    g = UniformGrid(10)
    assert g.h == 0.1
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 1.0
    assert len(g.nodes) == 11
    with pytest.raises(ValueError):
        UniformGrid(1)


def test_gridfunction_rejects_bad_values():
    g = UniformGrid(4)
    with pytest.raises(ValueError):
        GridFunction(g, [0, 1, np.nan, 0, 0])
    with pytest.raises(ValueError):
        GridFunction(g, [0, 1, 2])


def test_values_are_frozen():
    x = const(UniformGrid(4), 1.0)
    with pytest.raises(ValueError):
        x.values[0] = 2.0


@pytest.mark.parametrize("sigma, expected, tol", [
    (0.0, 1.0, 1e-12),
    (1.0, (1 - math.exp(-2)) / 2, 1e-6),
])
def test_inner_of_constants(fine, sigma, expected, tol):
    one = const(fine, 1.0)
    assert weighted_inner(one, one, sigma) == pytest.approx(expected, abs=tol)


def test_inner_linear(fine):
    t = GridFunction.from_callable(fine, lambda t: t)
    assert weighted_inner(t, const(fine, 1.0)) == pytest.approx(0.5, abs=1e-6)


def test_inner_grid_mismatch():
    with pytest.raises(ValueError, match="incompatible grids"):
        weighted_inner(const(UniformGrid(4), 1), const(UniformGrid(5), 1))


def test_norms(fine):
    assert weighted_norm(const(fine, 1.0)) == pytest.approx(1.0)
    assert weighted_norm(const(fine, 1.0), 1.0) == pytest.approx(0.657520, abs=1e-6)
    assert weighted_norm(const(fine, 3.0)) == pytest.approx(3.0)
    assert weighted_norm(const(fine, 0.0)) == 0.0
    assert sup_norm(const(fine, -2.0)) == 2.0
    assert sup_norm(GridFunction.from_callable(fine, lambda t: t)) == 1.0
    assert sup_norm(const(fine, 0.0)) == 0.0


def test_apply_weight(fine, rng):
    one = const(fine, 1.0)
    assert np.array_equal(apply_weight(one, 0.0).values, one.values)
    assert np.allclose(apply_weight(one, 1.0).values, np.exp(fine.nodes), rtol=0, atol=0)
    x = GridFunction(fine, rng.standard_normal(fine.n_cells + 1))
    back = apply_weight(apply_weight(x, 1.7), 1.7, inverse=True)
    assert np.allclose(back.values, x.values, rtol=1e-15, atol=0)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(arrays(float, 41, elements=finite), st.sampled_from([0.5, 1.0, 5.0]))
def test_isometry_and_equivalence(vals, sigma):
    x = GridFunction(UniformGrid(40), vals)
    n0 = weighted_norm(x, 0.0)
    ns = weighted_norm(x, sigma)
    assert abs(weighted_norm(apply_weight(x, sigma), sigma) - n0) <= 1e-10 * n0 + 1e-300
    assert math.exp(-sigma) * n0 <= ns + 1e-10
    assert ns <= n0 + 1e-10


@settings(max_examples=50, deadline=None)
@given(arrays(float, 41, elements=finite), arrays(float, 41, elements=finite),
       st.floats(0, 5))
def test_cauchy_schwarz(a, b, sigma):
    g = UniformGrid(40)
    x, y = GridFunction(g, a), GridFunction(g, b)
    assert abs(weighted_inner(x, y, sigma)) <= weighted_norm(x, sigma) * weighted_norm(y, sigma) + 1e-12 * (1 + np.abs(a).max() * np.abs(b).max())


def test_norm_equivalence_random(rng):
    g = UniformGrid(200)
    for _ in range(1000):
        x = GridFunction(g, rng.standard_normal(201))
        n0 = weighted_norm(x)
        for s in (0.5, 1.0, 5.0):
            ns = weighted_norm(x, s)
            assert math.exp(-s) * n0 <= ns + 1e-10 and ns <= n0 + 1e-10


def test_cumulative_integral_is_exact_for_interpolant():
    g = UniformGrid(10)
    x = GridFunction.from_callable(g, lambda t: 3 * t + 1)
    pts = [0.0, 0.013, 0.5, 0.77, 1.0]
    assert np.allclose(cumulative_integral_at(x, pts), [1.5 * p ** 2 + p for p in pts])
    with pytest.raises(ValueError):
        cumulative_integral_at(x, [1.5])


def test_random_smooth_reproducible():
    g = UniformGrid(100)
    a = random_smooth(g, np.random.default_rng(5))
    b = random_smooth(g, np.random.default_rng(5))
    assert np.array_equal(a.values, b.values)


def test_csv_round_trip(tmp_path, rng):
    g = UniformGrid(50)
    x = GridFunction(g, rng.standard_normal(51))
    path = tmp_path / "x.csv"
    write_csv(path, x)
    assert path.read_text().splitlines()[0] == "t,value"
    y = load_grid_function(path)
    assert np.array_equal(y.values, x.values)


def test_csv_resampling(tmp_path):
    g = UniformGrid(10)
    path = tmp_path / "lin.csv"
    write_csv(path, GridFunction.from_callable(g, lambda t: 2 * t))
    y = load_grid_function(path, UniformGrid(1000))
    assert np.allclose(y.values, 2 * y.nodes)


def test_csv_rejects_nonuniform(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,value\n0,1\n0.1,1\n0.5,1\n1,1\n")
    with pytest.raises(ValueError, match="uniform"):
        load_grid_function(path)
