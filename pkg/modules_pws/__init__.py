"""
Событийный интегратор кусочно-гладкой системы с трением покоя.
"""

from .events import Event, classify_landing, next_event, stick_exit
from .integrator import (
    Arc,
    StictionTree,
    Trajectory,
    caratheodory_residual,
    initial_branch,
    integrate_stiction,
    is_regular,
)
from .slip_flow import (
    NumericSlipArc,
    SlipArc,
    in_resonance_band,
    slip_flow,
    slip_flow_closed_form,
    slip_flow_jacobian,
    slip_flow_numeric,
)

__all__ = [
    "Event",
    "classify_landing",
    "next_event",
    "stick_exit",
    "Arc",
    "StictionTree",
    "Trajectory",
    "caratheodory_residual",
    "initial_branch",
    "integrate_stiction",
    "is_regular",
    "NumericSlipArc",
    "SlipArc",
    "in_resonance_band",
    "slip_flow",
    "slip_flow_closed_form",
    "slip_flow_jacobian",
    "slip_flow_numeric",
]
