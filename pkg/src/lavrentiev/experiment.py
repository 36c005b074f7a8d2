"""Synthetic problems, a priori parameter rules and convergence-rate studies."""

from __future__ import annotations

import csv
import enum
import json
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .autoconv import forward
from .grid import (DEFAULT_FINE_N, GridFunction, UniformGrid, load_grid_function,
                   sup_norm, weighted_norm, write_csv)
from .initval import NoiseKind, NoiseModel, clip_nonneg, reference_element
from .projector import spline_eval
from .solver import (SolveParams, SolveResult, l2_error, post_smooth,
                     smoothing_intervals, solve_pc, solve_spline)

log = logging.getLogger(__name__)


class Method(str, enum.Enum):
    PC = "pc"
    PC_SMOOTH = "pc-smooth"
    CUBIC = "cubic"


class SmoothingLevel(str, enum.Enum):
    """Knot intervals for post-smoothing: the cubic-solver level
    ``ceil((20/delta)**(1/4))`` or the minimal ``ceil(delta**(-1/4))``."""

    CUBIC = "cubic"
    MINIMAL = "minimal"


class AlphaRule(str, enum.Enum):
    SQRT = "sqrt"
    TWO_FIFTHS = "twofifths"


def f1(t):
    """Positive, decreasing and convex test solution."""
    return t ** 2 - 2 * t + 2


def f2(t):
    """Oscillating test solution."""
    return 2 + np.cos(4 * np.pi * t)


BUILTIN_SOLUTIONS = {"f1": f1, "f2": f2}
# max(sup |x0|, sup |x0'|) for the built-in solutions
BUILTIN_SMOOTHNESS = {"f1": 2.0, "f2": 4 * math.pi}


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Exact solution, fine grid, noise model and weight.

    `solution` is ``"f1"``, ``"f2"`` or a :class:`GridFunction` of custom
    samples (resampled linearly onto the fine grid).
    """

    solution: str | GridFunction = "f1"
    fine_n: int = DEFAULT_FINE_N
    noise: NoiseModel = field(default_factory=NoiseModel)
    sigma: float = 0.0

    def __post_init__(self):
        if self.fine_n < 100:
            raise ValueError(f"fine_n must be >= 100, got {self.fine_n}")
        if isinstance(self.solution, str) and self.solution not in BUILTIN_SOLUTIONS:
            raise ValueError(f"unknown solution {self.solution!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    @property
    def grid(self) -> UniformGrid:
        return UniformGrid(self.fine_n)

    @property
    def name(self) -> str:
        return self.solution if isinstance(self.solution, str) else "custom"

    def exact_solution(self) -> GridFunction:
        grid = self.grid
        if isinstance(self.solution, str):
            return GridFunction.from_callable(grid, BUILTIN_SOLUTIONS[self.solution])
        src = self.solution
        return GridFunction(grid, np.interp(grid.nodes, src.nodes, src.values))

    def smoothness_bound(self) -> float:
        """A priori bound on the C^1 norm of the exact solution."""
        if self.noise.smoothness_bound is not None:
            return self.noise.smoothness_bound
        if isinstance(self.solution, str):
            return BUILTIN_SMOOTHNESS[self.solution]
        x = self.exact_solution()
        return max(sup_norm(x), float(np.max(np.abs(np.gradient(x.values, x.grid.h)))))


def load_problem(path, fine_n: int = DEFAULT_FINE_N) -> GridFunction:
    return load_grid_function(path, UniformGrid(fine_n))


def generate_data(spec: ProblemSpec) -> tuple[GridFunction, GridFunction, GridFunction]:
    """Exact solution, exact data and clipped noisy data.

    The noise is i.i.d. uniform on [-1, 1] drawn from ``spec.noise.seed``
    and rescaled to unit sup norm (or unit L2 norm for L2 noise).
    """
    x0 = spec.exact_solution()
    y0 = forward(x0)
    rng = np.random.default_rng(spec.noise.seed)
    xi = GridFunction(x0.grid, rng.uniform(-1.0, 1.0, x0.grid.n_cells + 1))
    scale = sup_norm(xi) if spec.noise.kind is NoiseKind.SUP else weighted_norm(xi, 0.0)
    y_delta = clip_nonneg(y0 + (spec.noise.delta / scale) * xi)
    return x0, y0, y_delta


def _ceil(v: float) -> int:
    # guard against 400.00000000000006-style rounding before ceil
    return math.ceil(round(v, 9))


def _check_delta(delta):
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")


def choose_alpha(delta: float, rule: AlphaRule | str = AlphaRule.SQRT, c: float = 1.0) -> float:
    """``c sqrt(delta)`` for sup-norm noise, ``c delta**(2/5)`` for L2 noise."""
    _check_delta(delta)
    if not c > 0:
        raise ValueError("c must be positive")
    rule = AlphaRule(rule)
    return c * (math.sqrt(delta) if rule is AlphaRule.SQRT else delta ** 0.4)


def choose_m(delta: float, method: Method | str) -> int:
    """Discretization level: ``ceil(1/delta)`` cells for piecewise constants,
    ``ceil((20/delta)**(1/4))`` knot intervals for cubic splines."""
    _check_delta(delta)
    if Method(method) is Method.CUBIC:
        return _ceil((20.0 / delta) ** 0.25)
    return _ceil(1.0 / delta)


@dataclass(frozen=True, eq=False)
class RunResult:
    problem: str
    method: str
    delta: float
    alpha: float
    m: int
    sigma: float
    seed: int
    x_star: float
    l2_error: float
    residual: float
    wall_time: float
    iterations: int
    reconstruction: GridFunction
    x0: GridFunction
    smoothing_intervals: int | None = None

    def metadata(self) -> dict:
        return {
            "problem": self.problem,
            "method": self.method,
            "delta": self.delta,
            "alpha": self.alpha,
            "m": self.m,
            "sigma": self.sigma,
            "seed": self.seed,
            "x_star": self.x_star,
            "l2_error": self.l2_error,
            "residual_sigma": self.residual,
            "iterations": self.iterations,
            "wall_time_s": self.wall_time,
            "smoothing_intervals": self.smoothing_intervals,
        }


def _estimator_level(delta: float, fine_n: int) -> tuple[float, int]:
    # noiseless runs use the finest admissible level for the x0(0) estimate
    if delta > 0:
        return delta, min(_ceil(1.0 / delta), fine_n)
    return 1.0 / fine_n, fine_n


def run_single(spec: ProblemSpec, method: Method | str = Method.PC,
               alpha_rule: AlphaRule | str = AlphaRule.SQRT, c: float = 1.0,
               alpha: float | None = None, m: int | None = None,
               smoothing: SmoothingLevel | str = SmoothingLevel.CUBIC,
               out_dir=None, plot: bool = True) -> RunResult:
    """Generate data, build the reference element, solve and score one run.

    Post-smoothing (``pc-smooth``) projects onto the same spline space the
    cubic solver would use unless ``smoothing="minimal"``.

    With `out_dir` the reconstruction is written to ``run.csv``, the
    metadata to ``run.json`` and, if `plot`, an overlay figure to ``run.svg``.
    """
    method = Method(method)
    delta = spec.noise.delta
    if delta == 0 and (alpha is None or m is None):
        raise ValueError("noiseless runs need explicit alpha and m")
    x0, _, y_delta = generate_data(spec)
    grid = x0.grid

    est_delta, est_m = _estimator_level(delta, spec.fine_n)
    noise = replace(spec.noise, delta=est_delta, smoothness_bound=spec.smoothness_bound())
    x_star = reference_element(y_delta, noise, est_m, grid)

    if alpha is None:
        alpha = choose_alpha(delta, alpha_rule, c)
    if m is None:
        m = choose_m(delta, method)
    params = SolveParams(alpha=alpha, m=m, sigma=spec.sigma)

    t0 = time.perf_counter()
    n_smooth = None
    if method is Method.CUBIC:
        result: SolveResult = solve_spline(y_delta, x_star, params)
        recon = result.reconstruction
    else:
        result = solve_pc(y_delta, x_star, params)
        recon = result.reconstruction
        if method is Method.PC_SMOOTH:
            smooth_delta = delta if delta > 0 else est_delta
            if SmoothingLevel(smoothing) is SmoothingLevel.CUBIC:
                n_smooth = choose_m(smooth_delta, Method.CUBIC)
            else:
                n_smooth = smoothing_intervals(smooth_delta)
            recon = spline_eval(post_smooth(result.pc, smooth_delta, grid, n_smooth), grid)
    elapsed = time.perf_counter() - t0

    run = RunResult(
        problem=spec.name, method=method.value, delta=delta, alpha=alpha, m=m,
        sigma=spec.sigma, seed=spec.noise.seed, x_star=float(x_star.values[0]),
        l2_error=l2_error(recon, x0), residual=result.residual_sigma,
        wall_time=elapsed, iterations=result.iterations,
        reconstruction=recon, x0=x0, smoothing_intervals=n_smooth,
    )
    if out_dir is not None:
        write_run(run, out_dir, plot=plot)
    return run


def write_run(run: RunResult, out_dir, plot: bool = True) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "run.csv", run.reconstruction)
    with open(out / "run.json", "w") as fh:
        json.dump(run.metadata(), fh, indent=2)
    if plot:
        from .plotting import plot_reconstruction
        try:
            plot_reconstruction(run, out / "run.svg")
        except Exception as exc:  # plotting never gates the run
            log.warning("could not write run.svg: %s", exc)


@dataclass(frozen=True)
class RateRow:
    delta: float
    method: str
    m: int
    alpha: float
    l2_error: float
    residual: float
    wall_time: float


@dataclass(frozen=True)
class RateStudyResult:
    rows: list[RateRow]
    fitted_slopes: dict[str, float]


def fit_slope(deltas: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``-ln(error)`` against ``-ln(delta)``."""
    d = np.asarray(deltas, dtype=float)
    e = np.asarray(errors, dtype=float)
    if len(d) < 2:
        raise ValueError("need >= 2 deltas to fit a slope")
    if len(d) != len(e) or np.any(d <= 0) or np.any(e <= 0):
        raise ValueError("deltas and errors must be positive and of equal length")
    return float(np.polyfit(-np.log(d), -np.log(e), 1)[0])


def _run_cell(args):
    spec, method, alpha_rule, c, smoothing = args
    try:
        return run_single(spec, method, alpha_rule=alpha_rule, c=c, smoothing=smoothing)
    except Exception as exc:
        return exc


def rate_study(spec_template: ProblemSpec, deltas: Sequence[float],
               methods: Sequence[Method | str] = tuple(Method), repeats: int = 3,
               alpha_rule: AlphaRule | str = AlphaRule.SQRT, c: float = 1.0,
               smoothing: SmoothingLevel | str = SmoothingLevel.CUBIC,
               out_dir=None, workers: int = 1, plot: bool = True) -> RateStudyResult:
    """Mean errors over `repeats` seeds per (delta, method) and fitted rates.

    Seeds are ``spec_template.noise.seed + 0 .. repeats - 1``.  A failed
    cell is dropped from its mean with a warning; the results do not
    depend on `workers`.
    """
    deltas = [float(d) for d in deltas]
    methods = [Method(mt) for mt in methods]
    if len(deltas) < 2:
        raise ValueError("need >= 2 deltas to fit a slope")
    if any(not (0 < d <= 1) for d in deltas) or any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing and lie in (0, 1]")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")

    base_seed = spec_template.noise.seed
    jobs = []
    for d in deltas:
        for mt in methods:
            for r in range(repeats):
                noise = replace(spec_template.noise, delta=d, seed=base_seed + r)
                jobs.append((replace(spec_template, noise=noise), mt, alpha_rule, c, smoothing))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell, jobs))
    else:
        outcomes = [_run_cell(j) for j in jobs]

    rows = []
    it = iter(outcomes)
    for d in deltas:
        for mt in methods:
            runs = []
            for r in range(repeats):
                res = next(it)
                if isinstance(res, Exception):
                    warnings.warn(f"run failed (delta={d}, method={mt.value}, "
                                  f"seed={base_seed + r}): {res}")
                else:
                    runs.append(res)
            if not runs:
                continue
            rows.append(RateRow(
                delta=d, method=mt.value, m=runs[0].m, alpha=runs[0].alpha,
                l2_error=float(np.mean([u.l2_error for u in runs])),
                residual=float(np.mean([u.residual for u in runs])),
                wall_time=float(sum(u.wall_time for u in runs)),
            ))

    slopes = {}
    for mt in methods:
        sel = [row for row in rows if row.method == mt.value]
        if len(sel) >= 2:
            slopes[mt.value] = fit_slope([row.delta for row in sel], [row.l2_error for row in sel])
        else:
            warnings.warn(f"not enough successful runs to fit a slope for {mt.value}")
    result = RateStudyResult(rows, slopes)
    if out_dir is not None:
        write_rate(result, out_dir, plot=plot)
    return result


RATE_COLUMNS = ("delta", "method", "m", "alpha", "error", "residual", "time")


def write_rate(result: RateStudyResult, out_dir, plot: bool = True) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "rate.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RATE_COLUMNS)
        for r in result.rows:
            w.writerow([f"{r.delta:.17g}", r.method, r.m, f"{r.alpha:.17g}",
                        f"{r.l2_error:.17g}", f"{r.residual:.17g}", f"{r.wall_time:.6g}"])
    if plot:
        from .plotting import plot_rate
        try:
            plot_rate(result, out / "rate.svg")
        except Exception as exc:
            log.warning("could not write rate.svg: %s", exc)
