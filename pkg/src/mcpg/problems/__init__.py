from .base import Objective, SpinVector, as_spins, flip
from .maxcut import CheegerObjective, MaxCutInstance, cheeger_value
from .maxsat import MaxSatInstance
from .mimo import MimoInstance, mimo_build, noise_sigma, real_reduction
from .penalty import ParityConstraint, PenalizedObjective, penalty_value
from .quadratic import QuadraticSpinObjective
from .qubo import QuboInstance, qubo_to_spin

__all__ = [
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
    "noise_sigma",
    "real_reduction",
    "ParityConstraint",
    "PenalizedObjective",
    "penalty_value",
    "QuadraticSpinObjective",
    "QuboInstance",
    "qubo_to_spin",
]
