"""Numerical laboratory for generalized Orlicz growth and the weak Harnack inequality."""

__version__ = "0.1.0"

from .errors import (DomainError, NoConvergence, OrliczLabError, PreconditionError,
                     UnsupportedOperation)
from .extended import INF, is_inf, parse_extended
from .phi import (Ball, Coefficient, Custom, DoublePhase, GrowthField, PhiFunction, Power,
                  PowerLog, PsiR, VariableExponent, generalized_inverse, psi_r,
                  psi_sandwich_constants, sobolev_conjugate_inverse)
from .analysis import (ClippingWarning, GridFunction, ess_bounds, holder_check,
                       integral_mean_power, lebesgue_norm, luxemburg_norm, modular,
                       sobolev_norm)
from .conditions import (A1SearchSpec, ConditionReport, Sampling, check_a0, check_a1,
                         check_a1_omega, check_a1s, check_aDec, check_aInc,
                         estimate_exponent_range)
from .dp1d import (CaccioppoliConfig, DPParams, ExactDPSolution, energy, harnack_quotient,
                   hypothesis_quantities, limiting_exponent, p_laplace_nonintegrability,
                   sharpness_sweep, solve_double_phase_1d, verify_caccioppoli,
                   verify_supersolution, weak_harnack_ratio)
from .table import ExperimentTable
