"""Discretized Lavrent'ev regularization for the autoconvolution equation.

We look for ``x`` in an approximation space with

    Q (alpha (x_star - x) + y_delta - F(Q x)) = 0.

For the weighted piecewise-constant space the projected autoconvolution
is available in closed form, which makes the system lower triangular in
the coefficients: the first one solves a quadratic, every later one a
linear equation.  For cubic splines the Galerkin system is solved by a
damped Newton iteration.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .autoconv import forward, frechet_apply
from .grid import GridFunction, UniformGrid, sup_norm, weighted_norm
from .projector import (PcCoeffs, SplineFunction, pc_eval, pc_function_norm, pc_project,
                        spline_design_matrix, spline_project)

DIVISION_GUARD = 1e-14
MAX_HALVINGS = 20
MAX_SPLINE_INTERVALS = 64


class SolverError(RuntimeError):
    """Raised when a solver cannot produce a reconstruction."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(SolverError):
    pass


@dataclass(frozen=True)
class SolveParams:
    """Regularization parameter, discretization level and Newton controls.

    With ``weighted_projection=False`` the data and reference element are
    projected with the plain L2 piecewise-constant projection while
    `sigma` is still used for residual norms.
    """

    alpha: float
    m: int
    sigma: float = 0.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    weighted_projection: bool = True

    def __post_init__(self):
        if not self.alpha > 0 or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m}")
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be >= 1")

    @property
    def projection_sigma(self) -> float:
        return self.sigma if self.weighted_projection else 0.0


@dataclass(frozen=True, eq=False)
class SolveResult:
    reconstruction: GridFunction
    residual_sigma: float
    iterations: int
    wall_time: float
    method: str
    pc: PcCoeffs | None = None
    spline: SplineFunction | None = None


def projected_autoconvolution(c: np.ndarray, m: int) -> np.ndarray:
    """Coefficients of ``Q F(sum c_i f_i)`` in the same piecewise basis.

    Component ``i`` equals ``(conv_i + conv_{i-1}) / (2m)`` with
    ``conv = c * c`` the discrete self-convolution.
    """
    conv = np.convolve(c, c)[:m]
    out = conv.copy()
    out[1:] += conv[:-1]
    return out / (2.0 * m)


def _coefficient_residual(c, yc, xsc, alpha, m):
    return alpha * (xsc - c) + yc - projected_autoconvolution(c, m)


def _project_inputs(y_delta, x_star, p: SolveParams):
    s = p.projection_sigma
    return pc_project(y_delta, p.m, s).coeffs, pc_project(x_star, p.m, s).coeffs


def pc_recursion(yc: np.ndarray, xsc: np.ndarray, alpha: float) -> np.ndarray:
    """Solve the lower-triangular coefficient system by forward substitution."""
    m = len(yc)
    c = np.zeros(m)
    disc = (m * alpha) ** 2 + 2.0 * m * (yc[0] + alpha * xsc[0])
    if disc < 0:
        raise SolverError(f"negative discriminant {disc:.3g} for the first coefficient")
    c[0] = -m * alpha + math.sqrt(disc)
    denom = m * alpha + c[0]
    if denom < DIVISION_GUARD:
        raise SolverError("degenerate system: m*alpha + x^1 vanishes (alpha and data both zero?)")
    scale = m / denom
    for i in range(1, m):
        s1 = np.dot(c[:i], c[i - 1::-1])
        s2 = np.dot(c[1:i], c[i - 1:0:-1])
        c[i] = scale * (yc[i] + alpha * xsc[i] - (s1 + s2) / (2.0 * m))
    return c


def pc_system_residual(x: PcCoeffs, y_delta: GridFunction, x_star: GridFunction,
                       p: SolveParams) -> np.ndarray:
    """Componentwise residual of the piecewise-constant coefficient system."""
    if x.m != p.m:
        raise ValueError(f"coefficient count {x.m} does not match m={p.m}")
    yc, xsc = _project_inputs(y_delta, x_star, p)
    return _coefficient_residual(x.coeffs, yc, xsc, p.alpha, p.m)


def solve_pc(y_delta: GridFunction, x_star: GridFunction, p: SolveParams) -> SolveResult:
    """Explicit O(m^2) solver on the weighted piecewise-constant space.

    `y_delta` must be nonnegative (apply
    :func:`lavrentiev.initval.clip_nonneg` first).
    """
    if np.any(y_delta.values < 0):
        raise ValueError("data must be nonnegative; apply clip_nonneg first")
    t0 = time.perf_counter()
    yc, xsc = _project_inputs(y_delta, x_star, p)
    c = pc_recursion(yc, xsc, p.alpha)
    s = p.projection_sigma
    pc = PcCoeffs(p.m, s, c)
    r = _coefficient_residual(c, yc, xsc, p.alpha, p.m)
    return SolveResult(
        reconstruction=pc_eval(pc, y_delta.grid),
        residual_sigma=pc_function_norm(r, s, p.sigma),
        iterations=1,
        wall_time=time.perf_counter() - t0,
        method="pc",
        pc=pc,
    )


def smoothing_intervals(delta: float) -> int:
    """Number of spline knot intervals ``ceil(delta**(-1/4))`` for post-smoothing."""
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return max(1, math.ceil(round(delta ** -0.25, 9)))


def post_smooth(pc: PcCoeffs, delta: float, grid: UniformGrid,
                intervals: int | None = None) -> SplineFunction:
    """L2 projection of the piecewise-constant solution onto a coarse cubic spline.

    The spline has `intervals` knot intervals, by default the smallest
    level ``ceil(delta**(-1/4))`` that keeps the square-root rate.
    """
    if intervals is None:
        intervals = smoothing_intervals(delta)
    return spline_project(pc_eval(pc, grid), intervals)


def _galerkin_residual(basis, w, c, y, xs, alpha, grid):
    x = GridFunction(grid, basis @ c)
    r = alpha * (xs - x.values) + y - forward(x).values
    return basis.T @ (w * r), x


def solve_spline(y_delta: GridFunction, x_star: GridFunction, p: SolveParams) -> SolveResult:
    """Cubic-spline Galerkin solution by damped Newton iteration.

    All inner products are the trapezoid-weighted L2 products on the fine
    grid; `p.sigma` is not used.  The iteration starts from the constant
    spline equal to the mean of `x_star`.
    """
    if p.m > MAX_SPLINE_INTERVALS:
        raise ValueError(f"m={p.m} too large for the spline solver (max {MAX_SPLINE_INTERVALS})")
    if np.any(y_delta.values < 0):
        raise ValueError("data must be nonnegative; apply clip_nonneg first")
    t0 = time.perf_counter()
    grid = y_delta.grid
    basis = spline_design_matrix(grid, p.m)
    w = grid.trapezoid_weights
    y = y_delta.values
    xs = x_star.values
    n = basis.shape[1]
    mass = basis.T @ (w[:, None] * basis)
    columns = [GridFunction(grid, basis[:, i]) for i in range(n)]

    c = np.full(n, float(np.mean(xs)))
    r, x = _galerkin_residual(basis, w, c, y, xs, p.alpha, grid)
    rnorm = float(np.linalg.norm(r))
    target = p.newton_tol * (1.0 + weighted_norm(y_delta, 0.0))
    it = 0
    while rnorm > target:
        if it >= p.newton_max_iter:
            raise ConvergenceError(
                f"Newton did not converge in {p.newton_max_iter} iterations "
                f"(residual {rnorm:.3e})", residual=rnorm)
        it += 1
        dF = np.column_stack([frechet_apply(x, b).values for b in columns])
        jac = -p.alpha * mass - basis.T @ (w[:, None] * dF)
        try:
            if np.linalg.cond(jac) > 1e14:
                raise np.linalg.LinAlgError
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise SolverError("Newton Jacobian singular (alpha too small?)", residual=rnorm)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            c_new = c + lam * step
            r_new, x_new = _galerkin_residual(basis, w, c_new, y, xs, p.alpha, grid)
            rnorm_new = float(np.linalg.norm(r_new))
            if rnorm_new < rnorm:
                break
            lam *= 0.5
        else:
            raise ConvergenceError(
                f"Newton line search stalled (residual {rnorm:.3e})", residual=rnorm)
        c, r, x, rnorm = c_new, r_new, x_new, rnorm_new

    spline = SplineFunction(p.m, c)
    return SolveResult(
        reconstruction=x,
        residual_sigma=rnorm,
        iterations=it,
        wall_time=time.perf_counter() - t0,
        method="cubic",
        spline=spline,
    )


def residual_norm(x: GridFunction, y_delta: GridFunction, x_star: GridFunction,
                  p: SolveParams) -> float:
    """Sigma-norm of ``Q(alpha (x_star - x) + y_delta - F(Q x))`` at level ``p.m``.

    `Q` is the piecewise-constant projection, so the projected
    autoconvolution is evaluated exactly from the coefficients of ``Q x``.
    """
    s = p.projection_sigma
    c = pc_project(x, p.m, s).coeffs
    yc, xsc = _project_inputs(y_delta, x_star, p)
    r = _coefficient_residual(c, yc, xsc, p.alpha, p.m)
    return pc_function_norm(r, s, p.sigma)


def l2_error(x: GridFunction, x0: GridFunction) -> float:
    return weighted_norm(x - x0, 0.0)


def max_error(x: GridFunction, x0: GridFunction) -> float:
    return sup_norm(x - x0)
