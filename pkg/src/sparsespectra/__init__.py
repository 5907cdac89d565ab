"""Limiting spectral measures of sparse random graphs, three ways:
dense eigendecomposition of sampled graphs, Monte Carlo solution of the
recursive distributional equations of their tree limits, and closed-form
laws where they exist — with tooling to cross-validate the routes.
"""

from ._kernels import HAVE_NUMBA, USING_NUMBA, backend_name
from .closed_form import (
    DensityCurve,
    exact_density_curve,
    invert_stieltjes,
    kesten_mckay_density,
    kesten_mckay_stieltjes,
    measure_from_density,
    semicircle_density,
    semicircle_stieltjes,
)
from .distributions import DegreeDistribution, WeightSpec, size_biased_offspring
from .graphs import (
    Graph,
    RootedTree,
    WeightedGraph,
    attach_weights,
    gen_bipartite_configuration,
    gen_configuration,
    gen_erdos_renyi,
    gen_regular,
    gen_uniform_tree,
    sample_gwt,
    validate_graph,
)
from .localweak import (
    BALL_CAP,
    BallCapError,
    BallDistribution,
    RootedBall,
    ball_distribution,
    extract_ball,
    gwt_ball_distribution,
    pair_independence_stat,
    pooled_ball_distribution,
    tv_distance,
    uniform_integrability_profile,
)
from .rde import (
    Population,
    RdeParams,
    StieltjesCurve,
    bessel_equation_residual,
    convergence_diagnostic,
    rde_bipartite,
    rde_fixed_point,
    rde_skeleton,
    rde_weighted,
    root_expectation,
    root_expectation_bipartite,
    root_expectation_weighted,
    skeleton_consistency,
    skeleton_pools,
    stieltjes_curve,
    stieltjes_curve_bipartite,
    stieltjes_curve_skeleton,
    stieltjes_curve_weighted,
)
from .spectral import (
    DENSE_CAP,
    CapacityError,
    DeltaMatrix,
    SpectralMeasure,
    average_measures,
    delta_matrix,
    esd,
    histogram,
    kolmogorov_distance,
    levy_distance,
    rank_bound_check,
    resolvent_diag,
    schur_check,
    stieltjes_empirical,
    truncate_high_degree,
)

__version__ = "0.1.0"
