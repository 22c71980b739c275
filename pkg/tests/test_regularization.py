# -*- coding: utf-8 -*-
"""
Тесты регуляризации: φ, критическое многообразие, свёрнутые особенности,
утки, жёсткое интегрирование и цикл залипания.
"""
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from config_package.constants import (  # noqa: E402
    CanardKind,
    CriticalBranch,
    CriticalPointClass,
    PhiShape,
    SingularSet,
)
from modules_common.errors import (  # noqa: E402
    NoSingularitiesError,
    NoStickError,
    ShapeViolationError,
    SingularLineError,
)
from modules_model.params import Params, State  # noqa: E402
from modules_regularization.canards import maximal_canard, singular_canard  # noqa: E402
from modules_regularization.folds import (  # noqa: E402
    folded_saddles,
    folded_singularities,
    gamma_upper_bound,
    locate_saddle_node_collision,
)
from modules_regularization.phi import RegParams, build_phi  # noqa: E402
from modules_regularization.slow_fast import (  # noqa: E402
    critical_manifold_roots,
    desingularized_flow,
    reduced_flow,
    regularized_rhs,
    regularized_singular_set,
    repelling_set_membership,
)
from modules_regularization.stiff import (  # noqa: E402
    closeness_study,
    on_attracting_manifold,
    sticking_limit_cycle,
    stiff_integrate,
)
from modules_regularization.views import SAMPLE_COLUMNS, canard_frame, critical_manifold_frame  # noqa: E402


# ===== φ =====


def test_phi_conditions_and_shape():
    """δ = 0.6, μ_s/μ_d = 2.75: четыре условия до 1e-12 и форма."""
    phi = build_phi(0.6, 1.1, 0.4)
    assert np.max(np.abs(phi.conditions_residual())) <= 1e-12
    assert phi.ratio == pytest.approx(2.75)
    ys = np.linspace(0.0, 1.0, 501)
    assert np.allclose(phi.value(-ys), -phi.value(ys), atol=0.0)
    assert np.all(phi.d1(np.linspace(0.0, 0.6, 301)[1:-1]) > 0.0)
    assert np.all(phi.d1(np.linspace(0.6, 1.0, 301)[1:-1]) < 0.0)
    assert phi.d2(0.6) < 0.0


def test_phi_saturates_outside_unit_interval():
    """φ = sign(y) при |y| ≥ 1."""
    phi = build_phi(0.6, 1.1, 0.4)
    assert phi.value(3.0) == 1.0
    assert phi.value(-1.5) == -1.0
    assert phi.d1(2.0) == 0.0


def test_phi_rejects_bad_delta():
    """δ вне (0, 1) отклоняется."""
    with pytest.raises(ShapeViolationError):
        build_phi(1.2, 1.1, 0.4)


def test_phi_inverse_on_each_branch():
    """φ⁻¹ возвращает корень на отрезке нужной ветви."""
    phi = build_phi(0.6, 1.1, 0.4)
    yh = phi.inverse(2.0, CriticalBranch.C_A)
    assert 0.0 < yh < 0.6 and phi.value(yh) == pytest.approx(2.0, abs=1e-12)
    yh = phi.inverse(2.0, CriticalBranch.C_R_PLUS)
    assert 0.6 < yh < 1.0 and phi.value(yh) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        phi.inverse(0.5, CriticalBranch.C_R_PLUS)


# ===== Поля и критическое многообразие =====


def test_regularized_field_matches_slip_fields_outside_layer(table_params, reg_params):
    """При |y| ≥ ε регуляризованное поле совпадает с Z±."""
    z = State(0.1, 0.01, 0.7)
    f = regularized_rhs(z, table_params, reg_params)
    v = table_params.gamma2 * z.x + math.sin(z.theta)
    assert f[1] == pytest.approx(-v - table_params.mu_d)


def test_critical_manifold_root_counts(table_params, reg_params):
    """Один корень при |ξ| < μ_d, два при μ_d < |ξ| < μ_s, нет при |ξ| > μ_s."""
    roots = critical_manifold_roots(0.2, table_params, reg_params)
    assert [r.branch for r in roots] == [CriticalBranch.C_A]
    roots = critical_manifold_roots(0.7, table_params, reg_params)
    assert {r.branch for r in roots} == {CriticalBranch.C_A, CriticalBranch.C_R_MINUS}
    roots = critical_manifold_roots(-0.7, table_params, reg_params)
    assert {r.branch for r in roots} == {CriticalBranch.C_A, CriticalBranch.C_R_PLUS}
    assert critical_manifold_roots(1.3, table_params, reg_params) == []
    for r in critical_manifold_roots(0.7, table_params, reg_params):
        assert table_params.mu_d * reg_params.phi.value(r.yh) == pytest.approx(-0.7, abs=1e-12)


def test_monotone_regularization_collapses_onto_filippov_region(table_params):
    """Монотонная φ: ветвей C_r нет, многообразие лежит только над |ξ| ≤ μ_d."""
    rp = RegParams.create(table_params, eps=1e-3, shape=PhiShape.MONOTONE)
    for v in np.linspace(-1.05, 1.05, 43):
        roots = critical_manifold_roots(float(v), table_params, rp)
        assert all(r.branch is CriticalBranch.C_A for r in roots)
        assert len(roots) == (1 if abs(v) <= table_params.mu_d + 1e-12 else 0)


def test_reduced_flow_singular_on_fold(table_params, reg_params):
    """На линии складки ŷ = δ редуцированная задача не определена."""
    with pytest.raises(SingularLineError):
        reduced_flow(reg_params.delta, 1.0, table_params, reg_params)
    rf = reduced_flow(0.2, 1.0, table_params, reg_params)
    assert rf.reduced[1] == 1.0


def test_regularized_singular_set_windows(table_params, reg_params):
    """Î⁻ при θ ∈ (π/2, 3π/2) на ŷ = −δ, Î⁺ на ŷ = δ при cos θ > 0."""
    d = reg_params.delta
    assert regularized_singular_set(-d, 1.1, math.pi, table_params, reg_params) is SingularSet.I_MINUS
    assert regularized_singular_set(-d, 1.1, 0.3, table_params, reg_params) is None
    assert regularized_singular_set(d, -1.1, 0.3, table_params, reg_params) is SingularSet.I_PLUS


def test_repelling_set_membership(table_params, reg_params):
    """Q_r⁻: обратный ход по листу x = const доходит до складки в окне Î⁻ раньше, чем до ξ = μ_d."""
    x = 0.6 / table_params.gamma2
    assert repelling_set_membership(x, math.pi, table_params, reg_params) is CriticalBranch.C_R_MINUS
    assert repelling_set_membership(x, 0.3, table_params, reg_params) is None
    assert repelling_set_membership(0.0, math.pi, table_params, reg_params) is None
    monotone = RegParams.create(table_params, eps=1e-3, delta=0.6, shape=PhiShape.MONOTONE)
    assert repelling_set_membership(x, math.pi, table_params, monotone) is None


def test_critical_manifold_frame_columns(table_params, reg_params):
    """Таблица ветвей C₀ содержит все три ветви."""
    df = critical_manifold_frame(table_params, reg_params, n=101)
    assert list(df.columns) == SAMPLE_COLUMNS
    assert set(df["branch"]) == {b.value for b in CriticalBranch}


# ===== Свёрнутые особенности =====


def test_folded_singularities_positions_and_classes(table_params, reg_params):
    """(±δ, π/2), (±δ, 3π/2): седла на (−δ, π/2) и (δ, 3π/2), остальные — центры."""
    pts = {(round(c.yh, 12), round(c.theta, 12)): c.klass for c in folded_singularities(table_params, reg_params)}
    d = reg_params.delta
    assert pts[(round(-d, 12), round(math.pi / 2, 12))] is CriticalPointClass.FOLDED_SADDLE
    assert pts[(round(d, 12), round(3 * math.pi / 2, 12))] is CriticalPointClass.FOLDED_SADDLE
    assert pts[(round(d, 12), round(math.pi / 2, 12))] is CriticalPointClass.FOLDED_CENTER
    assert pts[(round(-d, 12), round(3 * math.pi / 2, 12))] is CriticalPointClass.FOLDED_CENTER


def test_saddle_eigenvalues_match_finite_differences(table_params, reg_params):
    """Собственные значения седла ±√(μ_d|φ″(δ)|) против разностного якобиана."""
    expected = math.sqrt(table_params.mu_d * abs(float(reg_params.phi.d2(reg_params.delta))))
    h = 1e-6
    for saddle in folded_saddles(table_params, reg_params):
        y, th = saddle.yh, saddle.theta
        jac = np.column_stack(
            [
                (desingularized_flow(y + h, th, table_params, reg_params)
                 - desingularized_flow(y - h, th, table_params, reg_params)) / (2 * h),
                (desingularized_flow(y, th + h, table_params, reg_params)
                 - desingularized_flow(y, th - h, table_params, reg_params)) / (2 * h),
            ]
        )
        fd = np.sort(np.real(np.linalg.eigvals(jac)))
        assert fd == pytest.approx([-expected, expected], abs=1e-8)
        assert np.sort(np.real(saddle.eigenvalues)) == pytest.approx([-expected, expected], abs=1e-12)


def test_saddle_node_collision(table_params, reg_params):
    """Седла исчезают при Γδ = 1."""
    Gamma_star, gamma_star = locate_saddle_node_collision(table_params, reg_params)
    assert abs(Gamma_star * reg_params.delta - 1.0) <= 1e-6
    assert gamma_star == pytest.approx(gamma_upper_bound(reg_params), rel=1e-6)
    with pytest.raises(NoSingularitiesError):
        folded_singularities(table_params, reg_params, Gamma=1.1 / reg_params.delta)


def test_gamma_upper_bound_value(reg_params):
    """1/√(εδ) при ε = 1e-3, δ = 0.6."""
    assert gamma_upper_bound(reg_params) == pytest.approx(40.8248, abs=1e-4)


# ===== Утки =====


def test_singular_vrai_canard_passes_attracting_then_repelling(table_params, reg_params):
    """Истинная утка идёт по C_a к седлу и уходит по C_r."""
    for saddle in folded_saddles(table_params, reg_params):
        seg = singular_canard(saddle, CanardKind.SINGULAR_VRAI, table_params, reg_params, n=200)
        assert seg.branches[0] is CriticalBranch.C_A
        assert seg.branches[-1] in (CriticalBranch.C_R_PLUS, CriticalBranch.C_R_MINUS)
        assert np.all(np.diff(seg.theta) > 0.0)
        assert np.min(np.abs(seg.theta - saddle.theta)) < 1e-12
        assert seg.departure_theta > saddle.theta
        df = canard_frame(seg)
        assert list(df.columns) == SAMPLE_COLUMNS
        assert len(df) == seg.theta.size


def test_singular_faux_canard_reverses_branches(table_params, reg_params):
    """Ложная утка приходит по C_r и уходит по C_a."""
    saddle = folded_saddles(table_params, reg_params)[0]
    seg = singular_canard(saddle, CanardKind.SINGULAR_FAUX, table_params, reg_params, n=200)
    assert seg.branches[0] is not CriticalBranch.C_A
    assert seg.branches[-1] is CriticalBranch.C_A


@pytest.mark.slow
def test_maximal_canard_joins_attracting_and_repelling_sheets(table_params, reg_params):
    """При ε > 0 последнее поворачивающее решение смыкается с обратным ходом по C_r у седла."""
    for saddle in folded_saddles(table_params, reg_params):
        mc = maximal_canard(saddle, table_params, reg_params)
        assert mc.bracket <= 1e-12
        assert mc.gap < 0.1
        assert mc.forward.kind is CanardKind.MAXIMAL_FORWARD
        assert mc.backward.kind is CanardKind.MAXIMAL_BACKWARD
        assert mc.forward.branches[0] is CriticalBranch.C_A
        assert np.min(np.abs(mc.forward.theta - saddle.theta)) < 0.05
        assert mc.forward.departure_theta > saddle.theta


# ===== Жёсткое интегрирование =====


def test_stiff_integrate_stays_near_attracting_manifold(table_params, reg_params):
    """С C_a решение остаётся в слое |y| ≤ ε на участке залипания."""
    z0 = on_attracting_manifold(0.0, 0.0, table_params, reg_params)
    traj = stiff_integrate(z0, 1.0, table_params, reg_params)
    assert np.max(np.abs(traj.states[:, 1])) <= reg_params.eps
    assert traj.t_end == pytest.approx(1.0)


def test_sticking_cycle_rejects_low_static_friction():
    """μ_s ≤ 1: периодического залипания нет."""
    p = Params(gamma=2.0, mu_s=0.9, mu_d=0.4)
    rp = RegParams.create(p, eps=1e-3, delta=0.6)
    with pytest.raises(NoStickError):
        sticking_limit_cycle(p, rp)


@pytest.mark.slow
def test_sticking_limit_cycle_scales_with_eps(table_params):
    """|x(0)| ≤ 10ε, |множитель| < 1, |x(0)| ~ ε."""
    xs = []
    eps_list = [1e-3, 1e-4]
    for eps in eps_list:
        rp = RegParams.create(table_params, eps=eps, delta=0.6)
        cycle = sticking_limit_cycle(table_params, rp)
        assert abs(cycle.x0) <= 10 * eps
        assert abs(cycle.multiplier) < 1.0
        xs.append(abs(cycle.x0))
    slope = math.log(xs[0] / xs[1]) / math.log(eps_list[0] / eps_list[1])
    assert 0.8 <= slope <= 1.2


@pytest.mark.slow
def test_closeness_exponent(table_params, reg_params):
    """d(ε) ~ ε^{2/3} для решения, проходящего одну складку."""
    study = closeness_study(
        State(0.05, 0.0, 0.0), 2.0, table_params, reg_params, [1e-4, 3e-4, 1e-3, 3e-3]
    )
    assert len(study.distances) == 4
    assert 0.55 <= study.slope <= 0.8
