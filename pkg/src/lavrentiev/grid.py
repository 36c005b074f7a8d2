"""Uniform grids on [0, 1], sampled functions and weighted L2 quadrature.

All integrals use the composite trapezoidal rule on the grid nodes.  The
weighted inner product is

    <x, y>_sigma = int_0^1 exp(-2 sigma t) x(t) y(t) dt,

which reduces to the plain L2 product for ``sigma = 0``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np

DEFAULT_FINE_N = 5000


@dataclass(frozen=True)
class UniformGrid:
    """Nodes ``t_k = k / n_cells`` for ``k = 0, ..., n_cells``."""

    n_cells: int = DEFAULT_FINE_N

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError(f"n_cells must be an integer >= 2, got {self.n_cells!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.arange(self.n_cells + 1) / self.n_cells
        t.flags.writeable = False
        return t

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_cells + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        w.flags.writeable = False
        return w


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Node values of a real function on a :class:`UniformGrid`.

    The value array is copied and frozen on construction; NaN or Inf
    anywhere is rejected.
    """

    grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_cells + 1,):
            raise ValueError(
                f"expected {self.grid.n_cells + 1} node values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: UniformGrid, f: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.broadcast_to(f(grid.nodes), grid.nodes.shape))

    @classmethod
    def constant(cls, grid: UniformGrid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.n_cells + 1, float(c)))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other_values(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other_values(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __len__(self):
        return len(self.values)


def check_same_grid(x: GridFunction, y: GridFunction) -> None:
    if x.grid.n_cells != y.grid.n_cells:
        raise ValueError(
            f"incompatible grids: {x.grid.n_cells} vs {y.grid.n_cells} cells")


def weight_factor(grid: UniformGrid, sigma: float) -> np.ndarray:
    """Node values of ``exp(sigma t)``."""
    _check_sigma(sigma)
    return np.exp(sigma * grid.nodes)


def _check_sigma(sigma: float) -> None:
    if not np.isfinite(sigma) or sigma < 0:
        raise ValueError(f"sigma must be finite and >= 0, got {sigma!r}")


def weighted_inner(x: GridFunction, y: GridFunction, sigma: float = 0.0) -> float:
    """Trapezoidal approximation of ``int_0^1 exp(-2 sigma t) x y dt``."""
    check_same_grid(x, y)
    _check_sigma(sigma)
    w = x.grid.trapezoid_weights
    if sigma:
        w = w * np.exp(-2.0 * sigma * x.grid.nodes)
    return float(np.dot(w, x.values * y.values))


def weighted_norm(x: GridFunction, sigma: float = 0.0) -> float:
    return float(np.sqrt(max(weighted_inner(x, x, sigma), 0.0)))


def sup_norm(x: GridFunction) -> float:
    return float(np.max(np.abs(x.values)))


def apply_weight(x: GridFunction, sigma: float, inverse: bool = False) -> GridFunction:
    """Multiply nodewise by ``exp(sigma t)``, or by ``exp(-sigma t)`` if `inverse`.

    This is the isometry from L2 onto the sigma-weighted space (forward
    direction) and its inverse.
    """
    f = weight_factor(x.grid, sigma)
    return GridFunction(x.grid, x.values / f if inverse else x.values * f)


def cumulative_integral_at(x: GridFunction, points) -> np.ndarray:
    """Integral from 0 to each point of the piecewise-linear interpolant of `x`.

    Exact for the interpolant, so points need not be grid nodes.
    """
    grid = x.grid
    pts = np.asarray(points, dtype=float)
    if np.any(pts < 0) or np.any(pts > 1):
        raise ValueError("integration limits must lie in [0, 1]")
    v = x.values
    h = grid.h
    cum = np.concatenate(([0.0], np.cumsum(0.5 * h * (v[:-1] + v[1:]))))
    k = np.minimum(np.floor(pts * grid.n_cells).astype(int), grid.n_cells - 1)
    tau = pts - grid.nodes[k]
    slope = (v[k + 1] - v[k]) / h
    return cum[k] + v[k] * tau + 0.5 * slope * tau ** 2


def random_smooth(grid: UniformGrid, rng: np.random.Generator, modes: int = 20) -> GridFunction:
    """Partial Fourier sum with standard normal coefficients on `modes` frequencies."""
    t = grid.nodes
    k = np.arange(1, modes + 1)[:, None]
    a = rng.standard_normal(modes)
    b = rng.standard_normal(modes)
    vals = rng.standard_normal() + a @ np.cos(2 * np.pi * k * t) + b @ np.sin(2 * np.pi * k * t)
    return GridFunction(grid, vals)


def write_csv(path, x: GridFunction, header: str = "value") -> None:
    """Write ``t,value`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", header])
        for t, v in zip(x.nodes, x.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``t,value`` file; returns the raw columns."""
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns t,value")
    return data[:, 0], data[:, 1]


def load_grid_function(path, grid: UniformGrid | None = None) -> GridFunction:
    """Load a CSV sampled on a uniform grid, resampled linearly onto `grid`.

    Without `grid` the file's own node count is kept.
    """
    t, v = read_csv(path)
    if len(t) < 3:
        raise ValueError(f"{path}: need at least 3 samples")
    if not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-6, atol=1e-12):
        raise ValueError(f"{path}: samples are not on a uniform grid")
    if not (abs(t[0]) < 1e-12 and abs(t[-1] - 1.0) < 1e-9):
        raise ValueError(f"{path}: samples must span [0, 1]")
    if grid is None:
        grid = UniformGrid(len(t) - 1)
    return GridFunction(grid, np.interp(grid.nodes, t, v))
