"""Monte Carlo policy-gradient solver for binary optimization.

A parameterized mean-field policy is trained by closed-form policy
gradients over samples drawn from parallel Metropolis-Hastings chains,
with local-search filter functions improving every sample.  Ships
objectives for MaxCut, QUBO, Cheeger cut, MIMO detection, and partial
MaxSAT, plus exact enumeration oracles and a CLI.
"""

from .filters import (
    EdgeLocalSearch,
    FilterKind,
    Identity,
    KFlip,
    LocalSearch,
    apply_filter,
    apply_filter_batch,
    edge_local_search_pass,
    filter_from_name,
    local_search_pass,
)
from .metrics import metric_ber, metric_gap, metric_p_ratio
from .policy import PolicyParams
from .problems import (
    CheegerObjective,
    MaxCutInstance,
    MaxSatInstance,
    MimoInstance,
    Objective,
    ParityConstraint,
    PenalizedObjective,
    QuadraticSpinObjective,
    QuboInstance,
    SpinVector,
    as_spins,
    cheeger_value,
    flip,
    mimo_build,
    penalty_value,
    qubo_to_spin,
)
from .sampler import SampleBatch, flip_acceptance, mh_chain, mh_chains, sample_batches
from .trainer import (
    TrainConfig,
    TrainResult,
    advantage,
    policy_gradient,
    pretrain_expectation,
    run,
    update,
)

__version__ = "0.1.0"

__all__ = [
    "PolicyParams",
    "Objective",
    "SpinVector",
    "as_spins",
    "flip",
    "MaxCutInstance",
    "CheegerObjective",
    "cheeger_value",
    "MaxSatInstance",
    "MimoInstance",
    "mimo_build",
    "ParityConstraint",
    "PenalizedObjective",
    "penalty_value",
    "QuadraticSpinObjective",
    "QuboInstance",
    "qubo_to_spin",
    "FilterKind",
    "Identity",
    "KFlip",
    "LocalSearch",
    "EdgeLocalSearch",
    "filter_from_name",
    "apply_filter",
    "apply_filter_batch",
    "local_search_pass",
    "edge_local_search_pass",
    "SampleBatch",
    "flip_acceptance",
    "mh_chain",
    "mh_chains",
    "sample_batches",
    "TrainConfig",
    "TrainResult",
    "advantage",
    "policy_gradient",
    "pretrain_expectation",
    "run",
    "update",
    "metric_gap",
    "metric_p_ratio",
    "metric_ber",
]
