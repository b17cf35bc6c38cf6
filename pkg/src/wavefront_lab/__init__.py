"""Numerical laboratory for traveling wavefronts of the degenerate
nutrient-bacteria reaction-diffusion system

    n_t = n_xx - n*b,    b_t = [D*n*b*b_x]_x + n*b.

Subpackages compute front profiles by shooting, the beta-parameterized
phase path, the threshold wave speed with certified bracket, an independent
left-half-line construction, a verification suite, and a direct PDE
simulator for cross-validation.
"""
from .types import (
    BisectionError,
    ConvergenceError,
    DomainError,
    FrontClassification,
    FrontKind,
    Params,
    Profile,
    SingularStall,
    SpeedBracket,
    ToleranceSet,
)
from .rates import (
    beta_lower_bound,
    decay_rate,
    lower_ratio,
    speed_lower_bound,
    speed_upper_bound,
)
from .profile import (
    LaunchPoint,
    WaveState,
    extend_beyond_tau,
    integrate_profile,
    launch,
    rhs,
)
from .phaseplane import (
    ComparisonReport,
    PhasePath,
    compare_with_aux,
    integrate_z,
    phase_rhs,
    profile_to_phase,
)
from .threshold import (
    AuxReaction,
    AuxSolution,
    aux_reaction,
    find_aux_threshold,
    find_threshold_bracket,
    solve_aux,
)
from .semiwave import (
    BetaCandidate,
    EtaSolution,
    SemiwaveResult,
    shoot_beta0,
    solve_eta_bvp,
    solve_left_semiwavefront,
)
from .verify import CheckEntry, CheckReport, CoverageError, profile_integrals, verify_profile
from .pde import (
    Field,
    FrontTruncationError,
    SpeedEstimate,
    compare_front_shape,
    initial_field,
    run_to_front,
    step,
    total_mass,
)

__version__ = "0.1.0"

__all__ = [
    "BisectionError",
    "ConvergenceError",
    "DomainError",
    "FrontClassification",
    "FrontKind",
    "Params",
    "Profile",
    "SingularStall",
    "SpeedBracket",
    "ToleranceSet",
    "beta_lower_bound",
    "decay_rate",
    "lower_ratio",
    "speed_lower_bound",
    "speed_upper_bound",
    "LaunchPoint",
    "WaveState",
    "extend_beyond_tau",
    "integrate_profile",
    "launch",
    "rhs",
    "ComparisonReport",
    "PhasePath",
    "compare_with_aux",
    "integrate_z",
    "phase_rhs",
    "profile_to_phase",
    "AuxReaction",
    "AuxSolution",
    "aux_reaction",
    "find_aux_threshold",
    "find_threshold_bracket",
    "solve_aux",
    "BetaCandidate",
    "EtaSolution",
    "SemiwaveResult",
    "shoot_beta0",
    "solve_eta_bvp",
    "solve_left_semiwavefront",
    "CheckEntry",
    "CheckReport",
    "CoverageError",
    "profile_integrals",
    "verify_profile",
    "Field",
    "FrontTruncationError",
    "SpeedEstimate",
    "compare_front_shape",
    "initial_field",
    "run_to_front",
    "step",
    "total_mass",
    "__version__",
]
