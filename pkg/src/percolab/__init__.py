"""percolab: a laboratory for Bernoulli bond percolation.

Exact enumeration oracles on small lattice balls, exploration processes and
monotone couplings between product laws and ghost-conditioned measures, and
seeded Monte Carlo estimators for cluster-volume statistics.
"""

__version__ = "0.1.0"

from .core import (
    ClusterResult,
    Params,
    cluster_of_origin,
    config_from_hex,
    config_to_hex,
    ghost_avoidance_weight,
    lazy_cluster,
    sample_config,
    sample_ghost,
)
from .coupling import (
    CoupledPair,
    StepViolation,
    couple_sequential,
    domination_margin,
    exhaustive_order_check,
)
from .errors import CapExceeded
from .estimators import (
    DecayFit,
    EstimateCI,
    MagnetizationInterval,
    TailBoundReport,
    crossing_probability,
    decay_fit,
    estimate_magnetization,
    estimate_psi,
    meanfield_verdict,
    psi_curve,
    tail_bound_verdict,
    wilson_interval,
)
from .exact import (
    DominationCertificate,
    ExplicitMeasure,
    conditional_measure,
    conditional_open_prob,
    exact_magnetization,
    exact_psi,
    fkg_step_check,
    magnetization_bound,
    make_conditional_oracle,
    max_conditional_pivotal,
    product_measure,
    strassen_dominates,
    verify_certificate,
)
from .exploration import (
    CLUSTER_FIRST,
    ClusterFirstRule,
    ExplorationTrace,
    PivotalQuery,
    cluster_first_next,
    is_pivotal_avoidance,
    pivotal_ghost_weight,
    run_exploration,
)
from .lattices import GraphBall, LatticeSpec, ball_to_json, build_ball, lazy_neighbors
