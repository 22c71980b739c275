"""
Модель осциллятора с трением покоя (безразмерная форма).
"""

from .params import TWO_PI, DimensionalParams, Params, State, wrap_angle
from .services import (
    HALF_PI,
    THREE_HALF_PI,
    Region,
    classify,
    filippov_sliding_region,
    forward_singular_set,
    friction,
    lie_derivatives,
    nondimensionalize,
    sticking_leaf_kind,
    sticking_points_inward,
    tangency,
    vector_field,
    xi,
)

__all__ = [
    "TWO_PI",
    "HALF_PI",
    "THREE_HALF_PI",
    "DimensionalParams",
    "Params",
    "State",
    "wrap_angle",
    "Region",
    "classify",
    "filippov_sliding_region",
    "forward_singular_set",
    "friction",
    "lie_derivatives",
    "nondimensionalize",
    "sticking_leaf_kind",
    "sticking_points_inward",
    "tangency",
    "vector_field",
    "xi",
]
