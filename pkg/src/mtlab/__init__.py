"""mtlab: a numerical laboratory for constrained exponential-growth maximization.

The package evaluates the critical-growth functional
int Phi_N(alpha |u|^{N'}) dx on radial profiles, maximizes it under the
inhomogeneous constraint ||grad u||_N^a + ||u||_N^b = 1, lower-bounds the
Gagliardo-Nirenberg best constant, brackets the attainment threshold in
alpha, and verifies the closed-form test-profile computations in exact
arithmetic.  The `mt` console script exposes everything.
"""

__version__ = "0.1.0"

from .appendix import (
    ClaimLedger,
    ExactRational,
    c_n_value,
    claim_ledger,
    gn_ratio_radial,
    n2_cubic_exact,
)
from .bounds import (
    BoundReport,
    BracketOptions,
    BracketReport,
    alpha0_nonexistence,
    attainment_test,
    bgn_condition,
    bracket_alpha_star,
    c_tilde_series,
    g_function_test,
    universal_lower_bound,
)
from .errors import (
    BracketNotFoundError,
    DegenerateProfileError,
    GridOverflowError,
    InvalidParameterError,
    MTLabError,
    SeriesOverflowError,
)
from .functional import (
    MTParams,
    SeriesControl,
    adachi_tanaka_ratio,
    constraint_value,
    j_truncated,
    mt_integral,
    mt_integral_series,
    phi,
    psi,
)
from .maximize import (
    GNOptions,
    GNReport,
    MaximizeOptions,
    MaximizerReport,
    diagnose_mode,
    functional_gradient,
    gn_ratio,
    maximize_d,
    maximize_gn,
    project_to_constraint,
)
from .radial import (
    RadialGrid,
    RadialProfile,
    build_grid,
    critical_exponent,
    decreasing_rearrangement,
    equal_mass_grid,
    evaluate,
    grad_norm_pow,
    lp_norm_pow,
    profile_from_csv,
    profile_to_csv,
    sample_profile,
    sphere_area,
)
from .scaling import (
    ScalingState,
    beta_star_derivative,
    dilate,
    dilation_lower_curve,
    gn_two_parameter_family,
    normalized_dilation,
    solve_beta_star,
)
from .sweeps import AxisSpec, SweepPlan, SweepResult, phase_map, run_sweep, sweep_to_csv
