"""Estimation of ``x0(0)`` from noisy data and the constant reference element.

Near ``s = 0`` the exact data behave like ``x0(0)**2 * s``, so the initial
value is recovered from a local average of the data divided by its
location.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, UniformGrid, cumulative_integral_at
from .projector import pc_project

log = logging.getLogger(__name__)


class NoiseKind(str, enum.Enum):
    SUP = "sup"
    L2 = "l2"


@dataclass(frozen=True)
class NoiseModel:
    """Noise type and level.

    ``delta = 0`` is accepted for noiseless experiments; the estimators
    themselves need a positive level.  `smoothness_bound` is an a priori
    bound on ``max(|x0|, |x0'|)`` and is only used for L2 noise.
    """

    kind: NoiseKind = NoiseKind.SUP
    delta: float = 0.01
    seed: int = 0
    smoothness_bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"noise level must lie in [0, 1], got {self.delta}")
        if self.smoothness_bound is not None and not self.smoothness_bound > 0:
            raise ValueError("smoothness_bound must be positive")


def clip_nonneg(y: GridFunction) -> GridFunction:
    return GridFunction(y.grid, np.maximum(y.values, 0.0))


def _check_delta(delta):
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")


def estimate_x0_sup(y_delta: GridFunction, delta: float, m: int) -> float:
    """Initial value estimate under sup-norm noise.

    Averages the data over the cell of width ``1/m`` containing
    ``sqrt(delta)`` and returns ``sqrt(average / sqrt(delta))``, or 0 when
    the average is negative.  Requires ``m * delta >= 1``.
    """
    _check_delta(delta)
    if m * delta < 1.0 - 1e-12:
        raise ValueError(f"need m * delta >= 1, got m={m}, delta={delta}")
    root = math.sqrt(delta)
    cell = min(int(math.floor(root * m)), m - 1)
    v = pc_project(y_delta, m, 0.0).coeffs[cell]
    return math.sqrt(v / root) if v >= 0 else 0.0


def l2_window(delta: float, smoothness_bound: float) -> tuple[float, bool]:
    """Averaging window ``((2/3) K**2)**(-2/5) * delta**(2/5)``, clamped to 1.

    Returns the window and whether it was clamped.
    """
    _check_delta(delta)
    if not smoothness_bound > 0:
        raise ValueError("smoothness_bound must be positive")
    h = (2.0 / 3.0 * smoothness_bound ** 2) ** -0.4 * delta ** 0.4
    return (1.0, True) if h > 1.0 else (h, False)


def estimate_x0_l2(y_delta: GridFunction, delta: float, smoothness_bound: float) -> float:
    """Initial value estimate under L2 noise from ``(2/h^2) int_0^h y``."""
    h, clamped = l2_window(delta, smoothness_bound)
    if clamped:
        log.warning("averaging window clamped to 1 (delta=%g, K=%g)", delta, smoothness_bound)
    integral = float(cumulative_integral_at(y_delta, [h])[0])
    return math.sqrt(2.0 * integral / h ** 2) if integral >= 0 else 0.0


def reference_element(y_delta: GridFunction, noise: NoiseModel, m: int,
                      grid: UniformGrid | None = None) -> GridFunction:
    """Constant function equal to the initial value estimate for `noise`."""
    grid = grid or y_delta.grid
    if noise.kind is NoiseKind.SUP:
        value = estimate_x0_sup(y_delta, noise.delta, m)
    else:
        if noise.smoothness_bound is None:
            raise ValueError("L2 noise needs a smoothness_bound")
        value = estimate_x0_l2(y_delta, noise.delta, noise.smoothness_bound)
    return GridFunction.constant(grid, value)
