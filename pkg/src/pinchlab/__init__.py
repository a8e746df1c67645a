"""pinchlab: a numerical laboratory for p-harmonic capacitary potentials on
rotationally symmetric Riemannian 3-manifolds.

The package solves the exterior p-harmonic potential problem on warped
products dr^2 + h(r)^2 g_(S^2), verifies the monotonicity formulas, capacity
law, curvature identities and interpolation inequalities that drive the
pinched-Ricci rigidity argument, and runs the full contradiction scenario to
report which geometric hypothesis breaks on each model.
"""

from .errors import ConfigError, ConvergenceError, DomainError, LineSearchError, PinchLabError
from .geometry import (
    CurvatureSample,
    GrowthReport,
    LevelSetData,
    ManifoldModel,
    PinchingReport,
    WarpFunction,
    ball_volume,
    cone_model,
    curvature,
    flat_model,
    gauss_identity_residual,
    growth_exponent,
    levelset_geometry,
    library,
    pinching_margin,
    positive_cap_model,
    potential_library,
    power_warp_model,
    spline_cap_model,
)
from .potential import (
    DecayReport,
    PExponent,
    PotentialSample,
    RadialPotential,
    as_p,
    capacity,
    decay_check,
    potential_at,
    radius_of_level,
    solve_radial,
)
from .variational import (
    CrossValidationReport,
    DiscreteProblem,
    DiscreteSolution,
    capacity_from_energy,
    constant_flux_profile,
    cross_validate,
    discretize,
    energy,
    minimize_energy,
)
from .functionals import (
    AuditConstants,
    DivergenceSample,
    GaussBonnetResult,
    HolderChainSample,
    MonotoneSample,
    PinchedInequalityReport,
    SmallSphereExpansion,
    audit_constants,
    div_fields,
    gauss_bonnet,
    high_genus_branch_slack,
    holder_chain,
    monotone_levels,
    monotone_sample,
    pinched_inequalities,
    small_sphere_expansion,
    value_F,
    value_G,
    willmore,
)
from .rigidity import (
    DichotomyTrajectory,
    OrderingReport,
    ThresholdReport,
    decay_dichotomy,
    ordering_check,
    pinching_threshold,
    run_contradiction_scenario,
    select_p,
    threshold,
)
from .report import ROW_COLUMNS, ScenarioReport, StageVerdict
from .cli import RunConfig, build_model, emit, parse_config, run, serialize

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "PinchLabError",
    "DomainError",
    "ConvergenceError",
    "LineSearchError",
    "ConfigError",
    # geometry
    "WarpFunction",
    "ManifoldModel",
    "CurvatureSample",
    "LevelSetData",
    "PinchingReport",
    "GrowthReport",
    "flat_model",
    "cone_model",
    "power_warp_model",
    "positive_cap_model",
    "spline_cap_model",
    "library",
    "potential_library",
    "curvature",
    "levelset_geometry",
    "gauss_identity_residual",
    "pinching_margin",
    "ball_volume",
    "growth_exponent",
    # potential
    "PExponent",
    "as_p",
    "PotentialSample",
    "RadialPotential",
    "solve_radial",
    "potential_at",
    "radius_of_level",
    "capacity",
    "DecayReport",
    "decay_check",
    # variational
    "DiscreteProblem",
    "DiscreteSolution",
    "discretize",
    "energy",
    "minimize_energy",
    "constant_flux_profile",
    "capacity_from_energy",
    "CrossValidationReport",
    "cross_validate",
    # functionals
    "MonotoneSample",
    "AuditConstants",
    "GaussBonnetResult",
    "DivergenceSample",
    "PinchedInequalityReport",
    "HolderChainSample",
    "SmallSphereExpansion",
    "value_F",
    "value_G",
    "monotone_sample",
    "monotone_levels",
    "audit_constants",
    "div_fields",
    "gauss_bonnet",
    "pinched_inequalities",
    "high_genus_branch_slack",
    "holder_chain",
    "willmore",
    "small_sphere_expansion",
    # rigidity
    "ThresholdReport",
    "DichotomyTrajectory",
    "OrderingReport",
    "pinching_threshold",
    "threshold",
    "select_p",
    "decay_dichotomy",
    "ordering_check",
    "run_contradiction_scenario",
    # report / cli
    "ROW_COLUMNS",
    "StageVerdict",
    "ScenarioReport",
    "RunConfig",
    "parse_config",
    "serialize",
    "build_model",
    "run",
    "emit",
]
