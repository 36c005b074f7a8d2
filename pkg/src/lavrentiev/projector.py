"""Piecewise-constant and cubic-spline approximation spaces on [0, 1].

The piecewise-constant space uses the cells ``[(i-1)/m, i/m)`` (the node
``t = 1`` belongs to the last cell) and the weighted basis

    f_i(s) = exp(sigma s) on cell i, 0 elsewhere,

so that the projection with coefficients ``x^i = m int_cell exp(-sigma t) x dt``
is orthogonal in the sigma-weighted inner product.  The cubic spline space
uses clamped B-splines on the equidistant knots ``0, 1/m, ..., 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import LinAlgError, solveh_banded

from .grid import (GridFunction, UniformGrid, apply_weight,
                   random_smooth, weight_factor, weighted_norm)

SPLINE_DEGREE = 3


@dataclass(frozen=True, eq=False)
class PcCoeffs:
    """Coefficients of ``sum_i coeffs[i] f_i`` in the sigma-weighted basis."""

    m: int
    sigma: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if self.m < 1 or c.shape != (self.m,):
            raise ValueError(f"expected {self.m} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError("sigma must be finite and >= 0")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)


def cell_index(grid: UniformGrid, m: int) -> np.ndarray:
    """0-based cell of every node under the half-open convention."""
    k = np.arange(grid.n_cells + 1)
    return np.minimum((k * m) // grid.n_cells, m - 1)


def _cell_integrals(g: np.ndarray, grid: UniformGrid, m: int) -> np.ndarray:
    """Integrals of `g` over each cell, using only the nodes the cell owns.

    Inside a cell the node values are joined linearly and extended to the
    cell edges by linear extrapolation, so values across a jump never mix.
    Exact for functions that are linear on every cell.
    """
    n = grid.n_cells
    h = grid.h
    i = np.arange(m + 1)
    first = -((-i * n) // m)            # first node with t_k >= i/m
    p, q = first[:-1], first[1:] - 1
    q[-1] = n
    a, b = i[:-1] / m, i[1:] / m
    cum = np.concatenate(([0.0], np.cumsum(0.5 * h * (g[:-1] + g[1:]))))
    inner = cum[q] - cum[p]
    single = q == p
    lo_slope = np.where(single, 0.0, (g[np.minimum(p + 1, n)] - g[p]) / h)
    hi_slope = np.where(single, 0.0, (g[q] - g[np.maximum(q - 1, 0)]) / h)
    left = p * h - a
    right = b - q * h
    return (inner + left * (g[p] - 0.5 * lo_slope * left)
            + right * (g[q] + 0.5 * hi_slope * right))


def pc_project(x: GridFunction, m: int, sigma: float = 0.0) -> PcCoeffs:
    """Project `x` onto the weighted piecewise-constant space with `m` cells.

    Computes ``m int_cell exp(-sigma t) x(t) dt`` from the node values of
    ``exp(-sigma t) x``.  Cell edges need not coincide with grid nodes, but
    every cell must own at least one node (``m <= n_cells``).
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if m > x.grid.n_cells:
        raise ValueError(f"m={m} exceeds the number of grid cells {x.grid.n_cells}")
    g = apply_weight(x, sigma, inverse=True).values
    return PcCoeffs(m, sigma, m * _cell_integrals(g, x.grid, m))


def pc_eval(p: PcCoeffs, grid: UniformGrid) -> GridFunction:
    vals = p.coeffs[cell_index(grid, p.m)] * weight_factor(grid, p.sigma)
    return GridFunction(grid, vals)


def pc_basis(m: int, sigma: float, i: int, grid: UniformGrid) -> GridFunction:
    """The basis element ``f_i`` (0-based `i`) sampled on `grid`."""
    c = np.zeros(m)
    c[i] = 1.0
    return pc_eval(PcCoeffs(m, sigma, c), grid)


def pc_basis_sq_norms(m: int, basis_sigma: float, norm_sigma: float) -> np.ndarray:
    """Exact squared ``norm_sigma``-norms of the ``basis_sigma`` basis elements."""
    a = np.arange(m) / m
    b = a + 1.0 / m
    rate = 2.0 * (basis_sigma - norm_sigma)
    if rate == 0.0:
        return np.full(m, 1.0 / m)
    return (np.exp(rate * b) - np.exp(rate * a)) / rate


def pc_function_norm(coeffs, basis_sigma: float, norm_sigma: float) -> float:
    """Exact weighted norm of a piecewise function given by its coefficients."""
    c = np.asarray(coeffs, dtype=float)
    return float(np.sqrt(np.dot(c * c, pc_basis_sq_norms(len(c), basis_sigma, norm_sigma))))


@dataclass(frozen=True, eq=False)
class SplineFunction:
    """Cubic spline on ``n_intervals`` equal knot intervals of [0, 1]."""

    n_intervals: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if self.n_intervals < 1 or c.shape != (self.n_intervals + SPLINE_DEGREE,):
            raise ValueError(
                f"expected {self.n_intervals + SPLINE_DEGREE} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spline coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def knots(self) -> np.ndarray:
        return spline_knots(self.n_intervals)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1) or np.any(np.isnan(t)):
            raise ValueError("spline evaluation is only defined on [0, 1]")
        return BSpline(self.knots, self.coeffs, SPLINE_DEGREE, extrapolate=False)(t)


def spline_knots(m: int) -> np.ndarray:
    inner = np.arange(m + 1) / m
    return np.concatenate(([0.0] * SPLINE_DEGREE, inner, [1.0] * SPLINE_DEGREE))


def greville_abscissae(m: int) -> np.ndarray:
    t = spline_knots(m)
    return np.array([t[j + 1:j + 1 + SPLINE_DEGREE].mean() for j in range(m + SPLINE_DEGREE)])


def spline_design_matrix(grid: UniformGrid, m: int) -> np.ndarray:
    """Dense ``(N + 1, m + 3)`` matrix of B-spline values at the grid nodes."""
    return BSpline.design_matrix(grid.nodes, spline_knots(m), SPLINE_DEGREE).toarray()


def _banded_gram(basis: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Upper banded storage of ``B^T diag(w) B`` for :func:`solveh_banded`."""
    n = basis.shape[1]
    wb = basis * weights[:, None]
    ab = np.zeros((SPLINE_DEGREE + 1, n))
    for d in range(SPLINE_DEGREE + 1):
        ab[SPLINE_DEGREE - d, d:] = np.einsum("ij,ij->j", wb[:, :n - d], basis[:, d:])
    return ab


def spline_project(x: GridFunction, m: int) -> SplineFunction:
    """Least-squares cubic spline fit in the trapezoid-weighted L2 product."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    grid = x.grid
    if grid.n_cells + 1 < 4 * (m + SPLINE_DEGREE):
        raise ValueError(
            f"fine grid too coarse for {m} spline intervals: need >= {4 * (m + 3)} nodes")
    basis = spline_design_matrix(grid, m)
    w = grid.trapezoid_weights
    rhs = basis.T @ (w * x.values)
    try:
        c = solveh_banded(_banded_gram(basis, w), rhs)
    except LinAlgError as exc:
        raise ValueError("singular spline Gram system") from exc
    return SplineFunction(m, c)


def spline_eval(s: SplineFunction, grid: UniformGrid) -> GridFunction:
    return GridFunction(grid, s(grid.nodes))


def _gap_ratios(m, sigma, trials, grid, seed, op):
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(trials):
        x = random_smooth(grid, rng)
        nx = weighted_norm(x, sigma)
        if nx > 0:
            best = max(best, weighted_norm(op(x), sigma) / nx)
    return best


def projector_gap(m: int, sigma: float, trials: int = 200,
                  grid: UniformGrid | None = None, seed: int = 0) -> float:
    """Monte-Carlo lower estimate of the operator gap between the plain and
    the sigma-weighted piecewise-constant projections, in the sigma-norm.

    The exact operator norm is bounded by ``2 sigma / m`` for ``m >= sigma``.
    """
    if m < sigma:
        raise ValueError(f"need m >= sigma, got m={m}, sigma={sigma}")
    if sigma == 0:
        return 0.0
    grid = grid or UniformGrid()

    def diff(x):
        return pc_eval(pc_project(x, m, 0.0), grid) - pc_eval(pc_project(x, m, sigma), grid)

    return _gap_ratios(m, sigma, trials, grid, seed, diff)


def projector_norm(m: int, sigma: float, trials: int = 200,
                   grid: UniformGrid | None = None, seed: int = 0) -> float:
    """Monte-Carlo lower estimate of the sigma-norm of the unweighted projection."""
    grid = grid or UniformGrid()
    return _gap_ratios(m, sigma, trials, grid, seed,
                       lambda x: pc_eval(pc_project(x, m, 0.0), grid))
