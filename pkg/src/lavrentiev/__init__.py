"""Discretized Lavrent'ev regularization for the autoconvolution equation."""

from .autoconv import forward, frechet_apply
from .experiment import (AlphaRule, Method, ProblemSpec, RateStudyResult, RunResult,
                         choose_alpha, choose_m, generate_data, rate_study, run_single)
from .grid import (GridFunction, UniformGrid, apply_weight, sup_norm, weighted_inner,
                   weighted_norm)
from .initval import (NoiseKind, NoiseModel, clip_nonneg, estimate_x0_l2, estimate_x0_sup,
                      reference_element)
from .projector import (PcCoeffs, SplineFunction, pc_eval, pc_project, projector_gap,
                        spline_eval, spline_project)
from .solver import (ConvergenceError, SolveParams, SolveResult, SolverError,
                     pc_system_residual, post_smooth, residual_norm, solve_pc, solve_spline)

__version__ = "0.1.0"
