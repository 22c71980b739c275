"""
Периодические орбиты скольжения-залипания: решение, продолжение по γ,
мультипликаторы Флоке и семейство регуляризованных орбит с утками.
"""

from .continuation import OrbitBranch, OrbitPoint, StepPolicy, continue_branch_pws, trace_pws_branches
from .diagnostics import (
    canard_multiplier_scan,
    no_canard_explosion_check,
    orbit_distance,
    transversality_check,
)
from .floquet import FloquetData, floquet_discontinuous, monodromy_discontinuous
from .regularized_branch import ArclengthPolicy, continue_branch_regularized, orbits_at_gamma
from .shooting import RegularizedOrbit, shoot_periodic_regularized, smooth_seed
from .slipstick import (
    SlipStickSolution,
    assemble_full_orbit,
    seed_slipstick,
    solve_slipstick,
    symmetry_map,
)

__all__ = [
    "OrbitBranch",
    "OrbitPoint",
    "StepPolicy",
    "continue_branch_pws",
    "trace_pws_branches",
    "canard_multiplier_scan",
    "no_canard_explosion_check",
    "orbit_distance",
    "transversality_check",
    "FloquetData",
    "floquet_discontinuous",
    "monodromy_discontinuous",
    "ArclengthPolicy",
    "continue_branch_regularized",
    "orbits_at_gamma",
    "RegularizedOrbit",
    "shoot_periodic_regularized",
    "smooth_seed",
    "SlipStickSolution",
    "assemble_full_orbit",
    "seed_slipstick",
    "solve_slipstick",
    "symmetry_map",
]
