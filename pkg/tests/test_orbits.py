# -*- coding: utf-8 -*-
"""
Тесты периодических орбит: скольжение-залипание, Флоке, семейства и диагностика.
"""
import math
import os
import sys

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from config_package.constants import BranchLabel, EventKind, FloquetClass, TerminationReason  # noqa: E402
from modules_common.errors import NoStickError  # noqa: E402
from modules_model.params import TWO_PI, Params  # noqa: E402
from modules_orbits.continuation import OrbitBranch, OrbitPoint, trace_pws_branches  # noqa: E402
from modules_orbits.diagnostics import (  # noqa: E402
    MultiplierScan,
    canard_multiplier_scan,
    no_canard_explosion_check,
    orbit_distance,
    transversality_check,
)
from modules_orbits.floquet import FloquetData, classify_multipliers, floquet_discontinuous  # noqa: E402
from modules_orbits.regularized_branch import continue_branch_regularized, orbits_at_gamma  # noqa: E402
from modules_orbits.shooting import RegularizedOrbit, shoot_periodic_regularized  # noqa: E402
from modules_orbits.slipstick import (  # noqa: E402
    assemble_full_orbit,
    half_period_symmetry_error,
    seed_slipstick,
    slipstick_residual,
)
from modules_orbits.views import BRANCH_COLUMNS, write_branch_csv  # noqa: E402
from modules_pws.integrator import is_regular  # noqa: E402
from modules_regularization.phi import RegParams  # noqa: E402


@pytest.fixture
def orbit_at_five(table_params):
    """Первое допустимое решение при γ = 5."""
    found = seed_slipstick(5.0, table_params)
    assert found
    return found[0]


def _synthetic_branch(amplitudes, labels):
    """Семейство без орбит: только γ, амплитуды и метки."""
    points = [
        OrbitPoint(gamma=1.0 + 0.1 * i, orbit=None, floquet=None, max_abs_y=a, label=lab)
        for i, (a, lab) in enumerate(zip(amplitudes, labels))
    ]
    return OrbitBranch(points=points)


# ===== Орбиты скольжения-залипания =====


def test_seed_slipstick_converges(table_params, orbit_at_five):
    """Невязка уравнений орбиты после Ньютона не больше 1e-10."""
    sol = orbit_at_five
    F, _ = slipstick_residual(np.array([sol.theta0, sol.theta_star]), table_params.with_gamma(5.0))
    assert float(np.max(np.abs(F))) <= 1e-10
    assert sol.residual_norm <= 1e-10
    assert 0.0 < sol.theta_star < math.pi
    assert sol.admissible


def test_seed_slipstick_requires_static_friction_above_one():
    """μ_s ≤ 1: залипания нет, искать нечего."""
    with pytest.raises(NoStickError):
        seed_slipstick(5.0, Params(gamma=5.0, mu_s=0.9, mu_d=0.4))


def test_full_orbit_closes_with_symmetric_halves(orbit_at_five):
    """Период: два срыва, два приземления, верхняя половина — образ нижней."""
    traj = assemble_full_orbit(orbit_at_five)
    assert traj.end_state.distance(orbit_at_five.z0) <= 1e-9
    kinds = [e.kind for e in traj.events]
    assert kinds[0] is EventKind.STICK_TO_SLIP_ONSET
    assert kinds.count(EventKind.STICK_TO_SLIP_ONSET) == 2
    assert kinds.count(EventKind.SLIP_TO_STICK_LANDING) == 2
    assert half_period_symmetry_error(traj) <= 1e-9
    assert is_regular(traj)


def test_floquet_contains_one_and_zero(orbit_at_five):
    """Спектр монодромии разрывной орбиты содержит 1 и 0."""
    data = floquet_discontinuous(orbit_at_five)
    assert abs(data.multipliers[0] - 1.0) <= 1e-8
    assert abs(data.multipliers[1]) <= 1e-8
    assert data.klass in tuple(FloquetClass)


def test_classify_multipliers():
    """Класс устойчивости по log|μ| нетривиальных мультипликаторов."""
    assert classify_multipliers([math.log(0.5)]) is FloquetClass.ATTRACTING
    assert classify_multipliers([-1.0, math.log(3.0)]) is FloquetClass.SADDLE
    assert classify_multipliers([2.0, 1.0]) is FloquetClass.REPELLING
    assert classify_multipliers([0.0]) is FloquetClass.DEGENERATE


# ===== Семейства Π₀ =====


@pytest.mark.slow
def test_pws_branches_split_at_resonance(table_params, tmp_path):
    """Два несвязных семейства: Π₀^l при γ < 1 и Π₀^r при γ > 1."""
    branches = trace_pws_branches((0.3, 5.0), table_params)
    labels = {br.label for br in branches}
    assert labels == {BranchLabel.PI0_LEFT, BranchLabel.PI0_RIGHT}
    for br in branches:
        lo, hi = br.gamma_range
        if br.label is BranchLabel.PI0_LEFT:
            assert hi < 1.0
        else:
            assert lo > 1.0
        for pt in br.points:
            assert abs(pt.floquet.multipliers[0] - 1.0) <= 1e-8
            assert abs(pt.floquet.multipliers[1]) <= 1e-8
    right = next(br for br in branches if br.label is BranchLabel.PI0_RIGHT)
    stars = [pt.orbit.theta_star for pt in sorted(right.points, key=lambda pt: pt.gamma)]
    assert stars[-1] > stars[0]

    # Π₀^l теряет устойчивость у видимого касания θ0 → π/2
    left = next(br for br in branches if br.label is BranchLabel.PI0_LEFT)
    classes = [pt.floquet.klass for pt in left.points]
    assert FloquetClass.ATTRACTING in classes
    near_tangency = min(left.points, key=lambda pt: math.cos(pt.orbit.theta0))
    assert near_tangency.floquet.klass is FloquetClass.REPELLING

    # концы чистого скольжения: θ* → 0
    pure = [br for br in branches if TerminationReason.PURE_SLIP in br.terminations.values()]
    assert pure
    for br in pure:
        assert min(pt.orbit.theta_star for pt in br.points) < 0.05

    path = write_branch_csv(branches, str(tmp_path / "pi0.csv"))
    df = pd.read_csv(path)
    assert list(df.columns) == BRANCH_COLUMNS
    assert len(df) == sum(len(br) for br in branches)


# ===== Диагностика =====


def test_explosion_check_bounded_amplitude():
    """Амплитуда уток в пределах 2× соседей — взрыва нет."""
    branch = _synthetic_branch(
        [0.30, 0.32, 0.40, 0.45, 0.35, 0.33],
        [BranchLabel.PIEPS_LEFT] * 2 + [BranchLabel.PIEPS_CENTER] * 2 + [BranchLabel.PIEPS_RIGHT] * 2,
    )
    scan = MultiplierScan(gamma=1.2, eps=[5e-4, 1e-3, 2e-3], log_mu3=[8.0, 4.0, 2.0], slope=0.004, intercept=0.0, r2=1.0)
    report = no_canard_explosion_check(branch, scan=scan)
    assert report.center_points == 2
    assert report.amplitude_ratio == pytest.approx(0.45 / 0.32)
    assert report.amplitude_bounded
    assert report.multiplier_explodes is True
    assert report.no_explosion


def test_explosion_check_flags_large_amplitude():
    """Утка в 3 раза выше соседей — амплитуда не ограничена."""
    branch = _synthetic_branch(
        [0.3, 0.9, 0.3],
        [BranchLabel.PIEPS_LEFT, BranchLabel.PIEPS_CENTER, BranchLabel.PIEPS_RIGHT],
    )
    report = no_canard_explosion_check(branch)
    assert not report.amplitude_bounded
    assert not report.no_explosion
    assert report.multiplier_explodes is None


def test_explosion_check_without_canards_warns():
    """Без сегмента Π_ε^c отношение не определено, в отчёте предупреждение."""
    branch = _synthetic_branch([0.3, 0.31], [BranchLabel.PIEPS_RIGHT] * 2)
    report = no_canard_explosion_check(branch)
    assert math.isnan(report.amplitude_ratio)
    assert report.warnings
    assert report.center_points == 0


def test_multiplier_scan_growth_needs_good_fit():
    """Рост засчитывается только при положительном наклоне и R² > 0.9."""
    base = dict(gamma=1.2, eps=[1e-3, 2e-3], log_mu3=[1.0, 2.0], intercept=0.0)
    assert MultiplierScan(slope=1.0, r2=0.95, **base).grows
    assert not MultiplierScan(slope=1.0, r2=0.5, **base).grows
    assert not MultiplierScan(slope=-1.0, r2=0.99, **base).grows


def test_transversality_requires_sticking():
    """μ_s ≤ 1: множества схода нет."""
    with pytest.raises(NoStickError):
        transversality_check(5.0, Params(gamma=5.0, mu_s=0.9, mu_d=0.4))


@pytest.mark.slow
@pytest.mark.parametrize("gamma", [5.0, 15.0])
def test_transversal_return(table_params, gamma):
    """Образ множества схода пересекает лепесток под ненулевым углом."""
    report = transversality_check(gamma, table_params)
    assert report.transversal
    assert abs(report.angle) > 1e-3
    assert math.pi / 2 < report.theta_out < math.pi


# ===== Регуляризованные орбиты =====


@pytest.mark.slow
def test_regularized_orbit_near_slipstick(table_params, reg_params, orbit_at_five):
    """Стрельба от разрывной орбиты сходится; с уменьшением ε орбиты сближаются."""
    reg = shoot_periodic_regularized(orbit_at_five, table_params, reg_params)
    assert reg.residual_norm <= 1e-9
    assert abs(reg.floquet.multipliers[0] - 1.0) <= 1e-6
    assert reg.gamma == pytest.approx(5.0)

    finer = shoot_periodic_regularized(reg, table_params, reg_params.with_eps(3e-4))
    assert orbit_distance(finer, orbit_at_five, table_params) < orbit_distance(reg, orbit_at_five, table_params)


@pytest.fixture(scope="module")
def pieps_branch():
    """Семейство Π_ε при ε = 1e-3, δ = 0.6 на γ ∈ [2, 45] (одно на модуль)."""
    p = Params(gamma=2.0, mu_s=1.1, mu_d=0.4)
    rp = RegParams.create(p, eps=1e-3, delta=0.6)
    return p, rp, continue_branch_regularized(p, rp, (2.0, 45.0), seed_gamma=2.0)


def _ring_orbit(gamma, phase, amp, lam, n=400):
    """Орбита-окружность радиуса amp с началом на фазе phase и μ₃ = lam."""
    offsets = np.linspace(0.0, TWO_PI, n + 1)
    t = phase + offsets
    xy = np.column_stack([amp * np.sin(t), amp * np.cos(t)])
    floquet = FloquetData(
        multipliers=(1.0, 0.2, lam),
        klass=classify_multipliers([math.log(0.2), math.log(lam)]),
        log_abs=(0.0, math.log(0.2), math.log(lam)),
    )
    return RegularizedOrbit(
        gamma=gamma,
        eps=1e-3,
        theta_phase=phase,
        phases=np.array([phase, phase + TWO_PI]),
        nodes=xy[:1].copy(),
        floquet=floquet,
        residual_norm=0.0,
        offsets=offsets,
        xy=xy,
        delta=0.6,
    )


def test_orbits_at_gamma_drops_phase_shifted_duplicates(mocker, table_params, reg_params):
    """Одна орбита, уточнённая из двух интервалов с разных фаз, считается один раз."""
    h = TWO_PI / 400
    seed = _ring_orbit(30.0, 0.0, 0.4, 3.0)
    branch = OrbitBranch(
        points=[OrbitPoint(gamma=g, orbit=seed, floquet=seed.floquet, max_abs_y=0.4) for g in (30.5, 31.5, 30.8, 31.2)]
    )
    refined = [
        _ring_orbit(31.0, 0.0, 0.4, 3.0),
        _ring_orbit(31.0, 37 * h, 0.4, 3.0),
        _ring_orbit(31.0, 0.0, 0.25, 0.5),
    ]
    shoot = mocker.patch("modules_orbits.regularized_branch.shoot_periodic_regularized", side_effect=refined)
    orbits = orbits_at_gamma(branch, 31.0, table_params, reg_params)
    assert shoot.call_count == 3
    assert len(orbits) == 2
    assert sorted(round(o.max_abs_y, 6) for o in orbits) == [0.25, 0.4]


@pytest.mark.slow
@pytest.mark.integration
def test_regularized_branch_fold_below_gamma_bound(pieps_branch):
    """Складка семейства Π_ε лежит ниже 1/√(εδ); при γ = 31 сосуществуют разные орбиты."""
    p, rp, branch = pieps_branch
    assert branch.fold_gammas
    assert max(branch.fold_gammas) < 1.0 / math.sqrt(1e-3 * 0.6)
    assert all(pt.label is not None for pt in branch.points)
    orbits = orbits_at_gamma(branch, 31.0, p, rp)
    assert len(orbits) >= 2
    signatures = {(round(o.max_abs_y, 4), o.floquet.klass) for o in orbits}
    assert len(signatures) == len(orbits)


@pytest.mark.slow
@pytest.mark.integration
def test_canard_multiplier_grows_like_inverse_eps(pieps_branch):
    """На утке Π_ε^c log|μ₃| растёт линейно по 1/ε, амплитуда не взрывается."""
    p, rp, branch = pieps_branch
    center = branch.labelled(BranchLabel.PIEPS_CENTER)
    assert center
    canard = center[len(center) // 2].orbit
    scan = canard_multiplier_scan(canard, [2e-3, 1e-3, 5e-4], p, rp)
    assert scan.eps == [5e-4, 1e-3, 2e-3]
    assert scan.log_mu3[0] > scan.log_mu3[-1]
    assert scan.grows

    report = no_canard_explosion_check(branch, scan=scan)
    assert report.amplitude_bounded
    assert report.no_explosion
