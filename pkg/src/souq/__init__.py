"""souq: second-order uncertainty quantification.

Distance-based total, aleatoric, and epistemic uncertainty for
distributions over the probability simplex (Dirichlet or ensemble
represented), the entropy and cross-entropy baselines, and a
property-testing harness for the structural axioms those measures
should satisfy.
"""
from .simplex import (
    CategoricalDistribution,
    LabelSpace,
    cross_entropy,
    dirac_first_order,
    entropy,
    kl_divergence,
    tv_distance,
    uniform_first_order,
)
from .special import BetaShape, beta_cdf, beta_pdf, beta_quantile, digamma, log_gamma
from .secondorder import (
    DirichletParams,
    EnsembleRep,
    RestrictedRep,
    SecondOrderRep,
    dirac_mixture,
    marginal_beta,
    mean,
    mean_preserving_spread,
    parse_distribution,
    product,
    restrict,
    sample,
    second_order_dirac,
    spread_preserving_shift,
    to_jsonable,
    vertex_uniform,
)
from .measures import (
    EuSolution,
    EuSolverConfig,
    SolverError,
    UncertaintyReport,
    au,
    eu,
    eu_bruteforce_oracle,
    eu_dirichlet,
    eu_ensemble,
    eu_objective_dirichlet,
    measure,
    normalize,
    tu,
    tu_restricted,
)
from .baselines import (
    BaselineReport,
    ce_eu,
    ce_tu,
    cross_entropy_report,
    entropy_au,
    entropy_eu,
    entropy_report,
    entropy_tu,
    kl_reframed,
)
from .axioms import (
    AXIOM_IDS,
    AxiomCheckResult,
    MeasureTriple,
    check_axiom,
    cross_entropy_triple,
    distance_triple,
    entropy_triple,
    find_violation_witness,
    replay_witness,
    run_suite,
)

__version__ = "0.1.0"
