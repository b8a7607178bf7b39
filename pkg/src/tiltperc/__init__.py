"""Lipschitz percolation above tilted planes.

Construction of minimal open surfaces from admissible-path reachability,
analytic lower/upper bounds on the critical closed-site probability, and
reproducible Monte Carlo estimation with a self-check suite tying the two
together.
"""
from .lattice import (
    ConfigField,
    FloorSpec,
    TiltSpec,
    box_coords,
    box_contains,
    cg_step_set,
    make_tilt,
    plane_floor,
    pyramid_floor,
    site_state,
)
from .paths import (
    ReachSet,
    ReversedWalk,
    ShellHitTime,
    SurfaceField,
    Window,
    d1_column_height,
    lambda_step_set,
    reach_size,
    reachable_set,
    reversed_walk,
    sample_shell_time,
    surface_field,
    surface_height,
)
from .bounds import (
    BoundsReport,
    SimplexWeights,
    bounds_report,
    cg_exponent,
    cg_threshold,
    epsilon_opt,
    expected_T_exact,
    gh12_reference,
    lb_alpha,
    lb_alpha_const,
    lb_general,
    lb_regime,
    lb_simplex,
    lb_simplex_opt,
    series_bound,
    theta_constant,
    ub_expected_T,
    ub_factorial,
)
from .rho import (
    GammaEstimate,
    gamma_estimate,
    height_map,
    max_closed_dp,
    project_config,
    rho_lambda_bridge,
)
from .mc import (
    EstimateCI,
    ReplicaPlan,
    estimate_pc,
    estimate_reach_size,
    estimate_shell_mean,
    estimate_tail,
    wilson_interval,
)

__version__ = "0.1.0"
