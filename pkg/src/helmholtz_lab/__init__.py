"""Radial Helmholtz solutions on constant-curvature surfaces.

Profiles L_{kappa,m} solve the separated Helmholtz equation in
nondimensional radius x = k rho; the library builds them with certified
log-space numerics, compares them against classical comparison theorems,
and runs the growth and reverse-inequality experiments built on top.
"""

from .errors import (DataError, DomainError, IntegrationError,
                     PreconditionError)
from .scaling import ScaledValue
from .geometry import (CurvatureContext, CutoffRadii, cos_kappa, cot_kappa,
                       cutoff_radii, inv_sin_kappa, log_tan_kappa_half,
                       sin_kappa, tan_kappa_half)
from .ode import LinearSolution, integrate_linear
from .bessel import (ZeroBracket, bessel_j, bessel_j_grid, bessel_max_function,
                     bessel_zeros, first_zero, first_zero_bracket,
                     refined_bracket)
from .radial import (MaxFunction, RadialProfile, extrema_envelope,
                     frobenius_start, integrate_radial, max_function)
from .quadrature import gauss_panel, integrate_log
from .comparisons import (BesselSide, BoundReport, ComparatorSpec, EulerSide,
                          OscillatorySide, PowerSide, ProfileSide,
                          curved_power_solution, euler_solution,
                          finite_difference_residual, matched_euler_side,
                          matched_power_side, oscillatory_solution,
                          picone_interlaces, radial_pq_witness,
                          sonin_polya_holds, sturm_dominates)
from .three_ball import (GrowthFit, ThreeBallQuery, growth_fit,
                         lemma_ratio_check, lemma_ratio_sweep, select_mode,
                         three_ball_lower_bound, upper_ratio_check,
                         upper_ratio_family, upper_ratio_geometry)
from .reverse import (EquatorReport, ModeMass, ReverseConstantReport,
                      caccioppoli_check, equator_counterexample, mode_mass,
                      reverse_constant)
from .parallel import parallel_map, worker_count

__version__ = "0.1.0"

__all__ = [
    "BesselSide", "BoundReport", "ComparatorSpec", "CurvatureContext",
    "CutoffRadii", "DataError", "DomainError", "EquatorReport", "EulerSide",
    "GrowthFit", "IntegrationError", "LinearSolution",
    "MaxFunction", "ModeMass", "OscillatorySide", "PowerSide",
    "PreconditionError", "ProfileSide", "RadialProfile",
    "ReverseConstantReport", "ScaledValue", "ThreeBallQuery", "ZeroBracket",
    "__version__", "bessel_j", "bessel_j_grid", "bessel_max_function",
    "bessel_zeros", "caccioppoli_check", "cos_kappa", "cot_kappa",
    "curved_power_solution", "cutoff_radii", "equator_counterexample",
    "euler_solution", "extrema_envelope", "finite_difference_residual",
    "first_zero", "first_zero_bracket", "frobenius_start", "gauss_panel",
    "growth_fit", "integrate_linear", "integrate_log", "integrate_radial",
    "inv_sin_kappa", "lemma_ratio_check", "lemma_ratio_sweep",
    "log_tan_kappa_half", "matched_euler_side", "matched_power_side",
    "max_function", "mode_mass", "oscillatory_solution", "parallel_map",
    "picone_interlaces", "radial_pq_witness", "refined_bracket",
    "reverse_constant", "select_mode", "sin_kappa", "sonin_polya_holds",
    "sturm_dominates", "tan_kappa_half", "three_ball_lower_bound",
    "upper_ratio_check", "upper_ratio_family", "upper_ratio_geometry",
    "worker_count",
]
