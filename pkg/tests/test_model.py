# -*- coding: utf-8 -*-
"""
Тесты модели трения покоя: закон трения, поля, области и касания.
"""
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from config_package.constants import (  # noqa: E402
    FieldBranch,
    RegionLabel,
    SingularSet,
    SlidingKind,
    StickingLeaf,
    TangencyKind,
    TangencyLabel,
)
from modules_common.errors import (  # noqa: E402
    BranchNotApplicableError,
    NotOnTangencySetError,
    UndefinedFrictionError,
)
from modules_model.params import DimensionalParams, Params, State, wrap_angle  # noqa: E402
from modules_model.services import (  # noqa: E402
    classify,
    filippov_sliding_region,
    forward_singular_set,
    friction,
    nondimensionalize,
    sticking_leaf_kind,
    tangency,
    vector_field,
    xi,
)


def _on_xi(value, theta, p):
    """Точка на y = 0 с заданным ξ при фазе θ."""
    return State((value - math.sin(theta)) / p.gamma2, 0.0, theta)


# ===== Параметры =====


def test_nondimensionalize_ignores_velocity_scale():
    """γ = √(κ/M)/ω, μ = N f / A; V не влияет на результат."""
    dp = DimensionalParams(M=2.0, kappa=8.0, A=10.0, omega=1.0, N=10.0, f_s=1.1, f_d=0.4)
    p = nondimensionalize(dp)
    assert p.gamma == pytest.approx(2.0)
    assert p.mu_s == pytest.approx(1.1)
    assert p.mu_d == pytest.approx(0.4)
    assert nondimensionalize(dp.model_copy(update={"V": 17.0})) == p


def test_params_require_static_above_dynamic():
    """μ_s ≤ μ_d отклоняется валидатором."""
    with pytest.raises(ValueError):
        Params(gamma=2.0, mu_s=0.4, mu_d=0.4)


def test_state_wraps_phase():
    """θ приводится к [0, 2π)."""
    z = State(0.0, 0.0, -0.5)
    assert z.theta == pytest.approx(2 * math.pi - 0.5)
    assert wrap_angle(2 * math.pi) == 0.0
    assert wrap_angle(-1e-17) == 0.0


# ===== Закон трения и поля =====


def test_friction_values(table_params):
    """Скольжение, залипание и срыв."""
    p = table_params
    assert friction(0.3, 5.0, p) == -0.4
    assert friction(-0.3, 5.0, p) == 0.4
    assert friction(0.0, 0.5, p) == 0.5
    assert friction(0.0, 1.5, p) == 1.1
    assert friction(0.0, -1.5, p) == -1.1


def test_friction_undefined_at_threshold(table_params):
    """При y = 0, |ξ| = μ_s закон трения не определён."""
    with pytest.raises(UndefinedFrictionError):
        friction(0.0, 1.1, table_params)
    with pytest.raises(UndefinedFrictionError):
        friction(0.0, -1.1, table_params)


def test_stick_friction_balances_spring(table_params):
    """При залипании трение компенсирует ξ: y' = −ξ + μ = 0."""
    p = table_params
    z = State(0.1, 0.0, 0.4)
    v = xi(z.x, z.theta, p)
    assert -v + friction(0.0, v, p) == 0.0


def test_stick_field_requires_zero_velocity(table_params):
    """Z_s определено только на y = 0."""
    assert np.array_equal(vector_field(State(0.1, 0.0, 1.0), table_params, FieldBranch.STICK), [0.0, 0.0, 1.0])
    with pytest.raises(BranchNotApplicableError):
        vector_field(State(0.1, 0.2, 1.0), table_params, FieldBranch.STICK)


def test_vector_field_symmetry(table_params):
    """Z∓(S(z)) = DS·Z±(z) для S(x, y, θ) = (−x, −y, θ + π)."""
    rng = np.random.default_rng(7)
    ds = np.diag([-1.0, -1.0, 1.0])
    for _ in range(50):
        x, y, th = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 2 * math.pi)
        z, sz = State(x, y, th), State(-x, -y, th + math.pi)
        for b, mirror in ((FieldBranch.PLUS, FieldBranch.MINUS), (FieldBranch.MINUS, FieldBranch.PLUS)):
            lhs = vector_field(sz, table_params, mirror)
            rhs = ds @ vector_field(z, table_params, b)
            assert np.allclose(lhs, rhs, atol=1e-14)


# ===== Области =====


def test_classify_partition(table_params):
    """Каждая точка получает ровно одну метку."""
    p = table_params
    assert classify(State(0.0, 0.5, 0.0), p).label is RegionLabel.G_PLUS
    assert classify(State(0.0, -0.5, 0.0), p).label is RegionLabel.G_MINUS
    assert classify(State(0.0, 0.0, 0.0), p).label is RegionLabel.SIGMA_S
    assert classify(State(1.0, 0.0, 0.0), p).label is RegionLabel.SIGMA_C_MINUS
    assert classify(State(-1.0, 0.0, 0.0), p).label is RegionLabel.SIGMA_C_PLUS


def test_classify_boundary_marks_singular_sets(table_params):
    """∂Σ_c⁻ при θ ∈ [0, π/2] — это I⁻, ∂Σ_c⁺ при θ ∈ [π/2, 3π/2] — I⁺."""
    p = table_params
    r = classify(_on_xi(1.1, 0.3, p), p)
    assert r.label is RegionLabel.BOUNDARY_C_MINUS and r.i_set is SingularSet.I_MINUS
    r = classify(_on_xi(1.1, math.pi, p), p)
    assert r.label is RegionLabel.BOUNDARY_C_MINUS and r.i_set is None
    r = classify(_on_xi(-1.1, math.pi, p), p)
    assert r.label is RegionLabel.BOUNDARY_C_PLUS and r.i_set is SingularSet.I_PLUS


@pytest.mark.parametrize(
    "value, expected",
    [
        (0.0, SlidingKind.FILIPPOV_SLIDING),
        (0.7, SlidingKind.STICTION_ONLY_SLIDING),
        (1.2, SlidingKind.CROSSING),
        (0.4, SlidingKind.DEGENERATE),
    ],
)
def test_filippov_sliding_region(table_params, value, expected):
    """Σ_{s,Filippov} = {|ξ| < μ_d} строго внутри Σ_s."""
    assert filippov_sliding_region(_on_xi(value, 0.0, table_params), table_params) is expected


def test_sticking_leaf_kind(table_params):
    """Лист периодичен при |γ²x| < μ_s − 1."""
    assert sticking_leaf_kind(0.02, table_params) is StickingLeaf.PERIODIC
    assert sticking_leaf_kind(0.05, table_params) is StickingLeaf.ESCAPING
    assert StickingLeaf.ESCAPING.title == "Залипание со срывом"


# ===== Касания =====


def test_tangency_atlas_stick_field(table_params):
    """Z_s касается ∂Σ_c⁻ видимо при π/2 и невидимо при 3π/2; при других θ трансверсально."""
    p = table_params
    which = TangencyKind.ZS_ON_BOUNDARY_C_MINUS
    assert tangency(_on_xi(1.1, math.pi / 2, p), p, which) is TangencyLabel.VISIBLE
    assert tangency(_on_xi(1.1, 3 * math.pi / 2, p), p, which) is TangencyLabel.INVISIBLE
    for theta in (0.3, math.pi, 5.0):
        assert tangency(_on_xi(1.1, theta, p), p, which) is TangencyLabel.NONE
    which = TangencyKind.ZS_ON_BOUNDARY_C_PLUS
    assert tangency(_on_xi(-1.1, 3 * math.pi / 2, p), p, which) is TangencyLabel.VISIBLE
    assert tangency(_on_xi(-1.1, math.pi / 2, p), p, which) is TangencyLabel.INVISIBLE


def test_tangency_atlas_slip_fields(table_params):
    """Z⁻ на ξ = μ_d: видимо при cos θ > 0, невидимо при cos θ < 0, сборка при cos θ = 0."""
    p = table_params
    which = TangencyKind.Z_MINUS_ON_SIGMA
    assert tangency(_on_xi(0.4, 0.3, p), p, which) is TangencyLabel.VISIBLE
    assert tangency(_on_xi(0.4, math.pi, p), p, which) is TangencyLabel.INVISIBLE
    assert tangency(_on_xi(0.4, math.pi / 2, p), p, which) is TangencyLabel.CUSP
    which = TangencyKind.Z_PLUS_ON_SIGMA
    assert tangency(_on_xi(-0.4, math.pi, p), p, which) is TangencyLabel.VISIBLE
    assert tangency(_on_xi(-0.4, 0.3, p), p, which) is TangencyLabel.INVISIBLE


def test_tangency_off_set_raises(table_params):
    """Точка вне множества касания — ошибка."""
    with pytest.raises(NotOnTangencySetError):
        tangency(State(0.0, 0.0, 0.3), table_params, TangencyKind.Z_MINUS_ON_SIGMA)


def test_forward_singular_set_only_at_visible_tangency(table_params):
    """Развилка только в точке видимого касания; обычный срыв единственен."""
    p = table_params
    assert forward_singular_set(_on_xi(1.1, math.pi / 2, p), p) is SingularSet.I_MINUS
    assert forward_singular_set(_on_xi(-1.1, 3 * math.pi / 2, p), p) is SingularSet.I_PLUS
    assert forward_singular_set(_on_xi(1.1, math.asin(0.9), p), p) is None
