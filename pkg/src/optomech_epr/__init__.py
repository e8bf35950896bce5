"""Steady-state EPR entanglement of mechanical resonators in a cavity driven by
the finite-bandwidth squeezed output of a parametric oscillator.

Frequencies are dimensionless, in units of the mean mechanical frequency.
"""

from .exceptions import (ConfigError, CriterionNotApplicableError, EigenSolverError,
                         NoFeasiblePointError, NonPhysicalStateError, PhysicsError,
                         ResonantOperatorError, ResonantPoleError, UnstableSystemError)
from .lyapunov import LyapunovOperator, lyapunov_residual, propagate_expm, solve_lyapunov
from .measures import (EntanglementReport, QuadratureCovariance, entanglement_report,
                       log_negativity_raw, logarithmic_negativity, optimal_phases, purity,
                       symplectic_eigenvalues, to_quadrature_cm, two_mode_variance)
from .model import (CavityParams, FrequencyConfig, MechanicalMode, OpoParams, SystemModel,
                    drift_matrix_full, drift_matrix_resonant, is_stable_eigen,
                    is_stable_routh_hurwitz, routh_hurwitz_margin, stability_info)
from .network import build_star_model, optimize_star_fields, pairwise_entanglement_map
from .optimize import (OptimizationSpec, SweepSpec, maximize_EN, sweep, with_param)
from .reservoir import (broadband_moments, squeezing_db, squeezing_spectrum,
                        steady_kernels, transient_kernels, v_kernel)
from .steadystate import (REGIMES, SteadyStateSolution, frame_transform, steady_state)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "CriterionNotApplicableError", "EigenSolverError", "NoFeasiblePointError",
    "NonPhysicalStateError", "PhysicsError", "ResonantOperatorError", "ResonantPoleError",
    "UnstableSystemError",
    "LyapunovOperator", "lyapunov_residual", "propagate_expm", "solve_lyapunov",
    "EntanglementReport", "QuadratureCovariance", "entanglement_report", "log_negativity_raw",
    "logarithmic_negativity", "optimal_phases", "purity", "symplectic_eigenvalues",
    "to_quadrature_cm", "two_mode_variance",
    "CavityParams", "FrequencyConfig", "MechanicalMode", "OpoParams", "SystemModel",
    "drift_matrix_full", "drift_matrix_resonant", "is_stable_eigen", "is_stable_routh_hurwitz",
    "routh_hurwitz_margin", "stability_info",
    "build_star_model", "optimize_star_fields", "pairwise_entanglement_map",
    "OptimizationSpec", "SweepSpec", "maximize_EN", "sweep", "with_param",
    "broadband_moments", "squeezing_db", "squeezing_spectrum", "steady_kernels",
    "transient_kernels", "v_kernel",
    "REGIMES", "SteadyStateSolution", "frame_transform", "steady_state",
]
