"""
Регуляризация разрывной системы: функция φ, медленно-быстрое разложение,
свёрнутые особенности и утки, жёсткое интегрирование.
"""

from .canards import CanardSegment, MaximalCanard, maximal_canard, singular_canard
from .folds import (
    CriticalPoint,
    folded_saddles,
    folded_singularities,
    gamma_upper_bound,
    locate_saddle_node_collision,
)
from .phi import PhiPolynomial, RegParams, build_phi, build_phi_st
from .slow_fast import (
    CriticalRoot,
    critical_manifold_roots,
    desingularized_flow,
    fast_rhs,
    reduced_flow,
    regularized_rhs,
    regularized_singular_set,
    repelling_set_membership,
    slow_rhs,
)
from .stiff import (
    ClosenessStudy,
    RegTrajectory,
    StickingCycle,
    closeness_study,
    sticking_limit_cycle,
    stiff_integrate,
)

__all__ = [
    "CanardSegment",
    "MaximalCanard",
    "maximal_canard",
    "singular_canard",
    "CriticalPoint",
    "folded_saddles",
    "folded_singularities",
    "gamma_upper_bound",
    "locate_saddle_node_collision",
    "PhiPolynomial",
    "RegParams",
    "build_phi",
    "build_phi_st",
    "CriticalRoot",
    "critical_manifold_roots",
    "desingularized_flow",
    "fast_rhs",
    "reduced_flow",
    "regularized_rhs",
    "regularized_singular_set",
    "repelling_set_membership",
    "slow_rhs",
    "ClosenessStudy",
    "RegTrajectory",
    "StickingCycle",
    "closeness_study",
    "sticking_limit_cycle",
    "stiff_integrate",
]
