"""Autoconvolution ``F(x)(s) = int_0^s x(s - t) x(t) dt`` and its derivative.

Both are evaluated at the grid nodes with the trapezoidal rule on the
node differences, so no interpolation is needed:

    y_k = h * (sum_{j=0}^{k} x_j x_{k-j} - x_0 x_k).
"""

import numpy as np

from .grid import GridFunction, check_same_grid


def _trapezoid_convolution(u: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    n = len(u)
    full = np.convolve(u, v)[:n]
    y = h * (full - 0.5 * (u[0] * v + u * v[0]))
    y[0] = 0.0
    return y


def forward(x: GridFunction) -> GridFunction:
    """Autoconvolution of `x` at every node; the value at ``t = 0`` is exactly 0."""
    return GridFunction(x.grid, _trapezoid_convolution(x.values, x.values, x.grid.h))


def frechet_apply(u: GridFunction, v: GridFunction) -> GridFunction:
    """Derivative of the autoconvolution at `u` applied to the direction `v`.

    ``[F'(u) v](s) = 2 int_0^s u(s - t) v(t) dt``.
    """
    check_same_grid(u, v)
    return GridFunction(u.grid, 2.0 * _trapezoid_convolution(u.values, v.values, u.grid.h))
