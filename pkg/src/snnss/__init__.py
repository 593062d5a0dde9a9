"""Simplest nearest-neighbor spin systems on regular graphs.

Spin-flip dynamics whose per-site rates depend only on the site's own spin
and its occupied-neighbor count. The package verifies the combinatorial
flip identities, fits and checks the second-moment closure that makes the
mean coverage solvable, evaluates the resulting closed forms against exact
uniformization and Gillespie simulation, and probes the spectral-gap
bounds, all on finite regular graphs.
"""

from .closed_form import (
    ClosedFormMCF,
    bernoulli_initial,
    build_mcf,
    decay_rates,
    density_limit,
    e_coeffs,
    epsilon_M,
    mcf_initial,
    select_model,
)
from .config_stats import (
    RESIDUAL_KEYS,
    Configuration,
    IdentityReport,
    StatsTable,
    all_empty,
    all_occupied,
    enumerate_configurations,
    eta1_fixture,
    eta2_fixture,
    identity_report,
    identity_report_batch,
    lemma_check,
    lemma_f1,
    lemma_residual_batch,
    neighbor_counts,
    occupied_neighbors,
    random_configurations,
    stats,
    with_occupied,
)
from .errors import (
    DegenerateSpectrumError,
    DomainError,
    EdgeListParseError,
    FitDegenerateError,
    GraphError,
    NonErgodicError,
    RegularityError,
    ResourceLimitError,
    SnnssError,
)
from .exact_solver import (
    FullGenerator,
    TransientSeries,
    bernoulli_distribution,
    build_full_generator,
    coverage_observable,
    point_distribution,
    spectral_gap_exact,
    state_index,
    stationary_distribution,
    transient_expectation,
    transient_mean_coverage,
)
from .generator import (
    ClosureFit,
    apply_generator,
    batch_g1,
    batch_g2,
    fit_closure,
    g1,
    g_iterate,
    site_rates,
)
from .gillespie import EnsembleEstimate, Trajectory, ensemble_mcf, replica_generator, simulate
from .graph import (
    NAMED_GRAPHS,
    ConditionIIWitness,
    Graph,
    build_cycle,
    build_named,
    build_torus,
    check_triangle_free,
    distance_shell,
    distances_from,
    find_condition_ii,
    load_edge_list,
)
from .rates import (
    CLASS_PRIORITY,
    ModelClass,
    RateTable,
    classify,
    flip_rate,
    make_generalized_threshold,
    make_noisy_voter,
    make_threshold_voter,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # graphs
    "Graph",
    "ConditionIIWitness",
    "NAMED_GRAPHS",
    "build_cycle",
    "build_torus",
    "build_named",
    "load_edge_list",
    "distances_from",
    "distance_shell",
    "check_triangle_free",
    "find_condition_ii",
    # configurations and statistics
    "Configuration",
    "StatsTable",
    "IdentityReport",
    "RESIDUAL_KEYS",
    "all_empty",
    "all_occupied",
    "with_occupied",
    "eta1_fixture",
    "eta2_fixture",
    "neighbor_counts",
    "occupied_neighbors",
    "stats",
    "identity_report",
    "identity_report_batch",
    "lemma_f1",
    "lemma_check",
    "lemma_residual_batch",
    "enumerate_configurations",
    "random_configurations",
    # rate tables
    "RateTable",
    "ModelClass",
    "CLASS_PRIORITY",
    "flip_rate",
    "make_noisy_voter",
    "make_threshold_voter",
    "make_generalized_threshold",
    "classify",
    # generator action
    "site_rates",
    "g1",
    "apply_generator",
    "g_iterate",
    "batch_g1",
    "batch_g2",
    "ClosureFit",
    "fit_closure",
    # closed forms
    "ClosedFormMCF",
    "select_model",
    "mcf_initial",
    "bernoulli_initial",
    "e_coeffs",
    "decay_rates",
    "build_mcf",
    "density_limit",
    "epsilon_M",
    # exact solver
    "FullGenerator",
    "TransientSeries",
    "build_full_generator",
    "state_index",
    "point_distribution",
    "bernoulli_distribution",
    "coverage_observable",
    "transient_expectation",
    "transient_mean_coverage",
    "spectral_gap_exact",
    "stationary_distribution",
    # simulation
    "Trajectory",
    "EnsembleEstimate",
    "simulate",
    "ensemble_mcf",
    "replica_generator",
    # errors
    "SnnssError",
    "GraphError",
    "EdgeListParseError",
    "RegularityError",
    "DomainError",
    "ResourceLimitError",
    "NonErgodicError",
    "FitDegenerateError",
    "DegenerateSpectrumError",
]
