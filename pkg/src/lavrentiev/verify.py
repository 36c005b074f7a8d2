"""Numerical checks of the operator, projector, estimator and solver bounds.

Each suite returns a list of :class:`Check`; the CLI prints one line per
check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .autoconv import forward, frechet_apply
from .experiment import NoiseModel, ProblemSpec, fit_slope, generate_data
from .grid import GridFunction, UniformGrid, random_smooth, sup_norm, weighted_norm
from .initval import clip_nonneg, estimate_x0_l2, estimate_x0_sup
from .projector import pc_eval, pc_project, projector_gap, projector_norm
from .solver import SolveParams, l2_error, pc_system_residual, solve_pc


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    bound: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}: {self.value:.6g} (bound {self.bound:.6g})"


def _le(name, value, bound):
    return Check(name, bool(value <= bound), float(value), float(bound))


def _ge(name, value, bound):
    return Check(name, bool(value >= bound), float(value), float(bound))


def operator_suite(trials=1000, n_cells=5000, seed=0):
    grid = UniformGrid(n_cells)
    rng = np.random.default_rng(seed)
    worst = {0.0: [-np.inf, -np.inf], 1.0: [-np.inf, -np.inf]}
    for _ in range(trials):
        u = random_smooth(grid, rng)
        v = random_smooth(grid, rng)
        fu = forward(u)
        duv = frechet_apply(u, v)
        for s, w in worst.items():
            nu = weighted_norm(u, s)
            w[0] = max(w[0], weighted_norm(fu, s) - nu ** 2)
            w[1] = max(w[1], weighted_norm(duv, s) - 2 * nu * weighted_norm(v, s))
    checks = []
    for s, (a, b) in worst.items():
        checks.append(_le(f"|F(x)|_s - |x|_s^2, sigma={s:g}", a, 1e-8))
        checks.append(_le(f"|F'(u)v|_s - 2|u|_s|v|_s, sigma={s:g}", b, 1e-8))

    x = random_smooth(grid, rng)
    v = random_smooth(grid, rng)
    rem = 0.0
    for eps in (1e-3, 1e-4):
        lhs = forward(x + eps * v) - forward(x) - eps * frechet_apply(x, v)
        rem = max(rem, sup_norm(lhs - eps ** 2 * forward(v)))
    checks.append(_le("quadratic Taylor remainder", rem, 1e-10))
    pos = GridFunction(grid, np.abs(x.values))
    checks.append(_ge("min F(x) for x >= 0", float(forward(pos).values.min()), 0.0))
    return checks


def projector_suite(trials=200, n_cells=5000, seed=0):
    grid = UniformGrid(n_cells)
    checks = []
    for m in (10, 100):
        checks.append(_le(f"|Q_m - Q_m^sigma|, sigma=1, m={m}",
                          projector_gap(m, 1.0, trials, grid, seed), 2.0 / m + 1e-6))
        checks.append(_le(f"|Q_m| in sigma-norm, sigma=1, m={m}",
                          projector_norm(m, 1.0, trials, grid, seed), 1 + 2.0 / m + 1e-6))
    rng = np.random.default_rng(seed)
    x = random_smooth(grid, rng)
    for s in (0.0, 1.0):
        q = pc_eval(pc_project(x, 20, s), grid)
        checks.append(_le(f"|Q x|_s - |x|_s, sigma={s:g}",
                          weighted_norm(q, s) - weighted_norm(x, s), 1e-8))
    f2 = GridFunction.from_callable(grid, lambda t: 2 + np.cos(4 * np.pi * t))
    ms = [10, 20, 40, 80]
    for s in (0.0, 1.0):
        errs = [weighted_norm(f2 - pc_eval(pc_project(f2, m, s), grid), s) for m in ms]
        order = -np.polyfit(np.log(ms), np.log(errs), 1)[0]
        checks.append(_ge(f"piecewise-constant approximation order, sigma={s:g}", order, 0.9))
    return checks


def initval_suite(seeds=5, n_cells=5000):
    checks = []
    deltas = (0.04, 0.01, 0.0025, 0.001)
    worst = 0.0
    for d in deltas:
        m = math.ceil(round(1 / d, 9))
        for s in range(seeds):
            _, _, yd = generate_data(ProblemSpec("f1", n_cells, NoiseModel("sup", d, s)))
            worst = max(worst, abs(estimate_x0_sup(yd, d, m) - 2.0) / math.sqrt(d))
    checks.append(_le("|est - x0(0)| / sqrt(delta), sup noise", worst, 4.25))
    errs = []
    for d in deltas:
        e = []
        for s in range(seeds):
            _, _, yd = generate_data(ProblemSpec("f1", n_cells, NoiseModel("l2", d, s)))
            e.append(abs(estimate_x0_l2(yd, d, 2.0) - 2.0))
        errs.append(np.mean(e))
    checks.append(_ge("L2-noise estimator order", fit_slope(deltas, errs), 0.35))
    return checks


def random_pc_config(grid, rng):
    """Noisy data of a random positive solution with alpha ~ sqrt(delta), m <= 1/delta."""
    b = random_smooth(grid, rng, modes=5)
    x = GridFunction(grid, rng.uniform(1, 3) + 0.3 * b.values / sup_norm(b))
    delta = 10 ** rng.uniform(-3, -1)
    xi = rng.uniform(-1, 1, grid.n_cells + 1)
    y = clip_nonneg(forward(x) + delta / np.max(np.abs(xi)) * xi)
    xs = GridFunction.constant(grid, x.values[0] * rng.uniform(0.8, 1.2))
    p = SolveParams(alpha=rng.uniform(0.5, 2) * math.sqrt(delta),
                    m=int(rng.integers(2, math.ceil(1 / delta) + 1)),
                    sigma=float(rng.choice([0.0, 0.5, 1.0, 3.0])))
    return y, xs, p


def solver_suite(configs=50, n_cells=2000, seed=0):
    rng = np.random.default_rng(seed)
    grid = UniformGrid(n_cells)
    worst = 0.0
    for _ in range(configs):
        y, xs, p = random_pc_config(grid, rng)
        res = solve_pc(y, xs, p)
        yc = pc_project(y, p.m, p.sigma).coeffs
        r = pc_system_residual(res.pc, y, xs, p)
        worst = max(worst, float(np.max(np.abs(r) / (1 + np.abs(yc)))))
    checks = [_le("explicit solver scaled residual", worst, 1e-10)]

    x0, y0, _ = generate_data(ProblemSpec("f1", 5000, NoiseModel("sup", 0.0)))
    res = solve_pc(y0, GridFunction.constant(x0.grid, 2.0), SolveParams(1e-4, 400))
    checks.append(_le("noiseless L2 error, m=400", l2_error(res.reconstruction, x0), 5e-2))
    return checks


SUITES = {
    "operator": operator_suite,
    "projector": projector_suite,
    "initval": initval_suite,
    "solver": solver_suite,
}
