# -*- coding: utf-8 -*-
"""
Тесты событийного интегратора разрывной системы.
"""
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from config_package.constants import BranchPolicy, EventKind, FieldBranch  # noqa: E402
from modules_common.errors import (  # noqa: E402
    BackwardTimeError,
    NoEventWithinHorizonError,
    ResonanceGuardError,
)
from modules_model.params import Params, State  # noqa: E402
from modules_model.services import xi  # noqa: E402
from modules_orbits.slipstick import symmetry_map  # noqa: E402
from modules_pws.events import next_event  # noqa: E402
from modules_pws.integrator import (  # noqa: E402
    StictionTree,
    Trajectory,
    caratheodory_residual,
    integrate_stiction,
    is_regular,
)
from modules_pws.slip_flow import (  # noqa: E402
    NumericSlipArc,
    SlipArc,
    slip_flow,
    slip_flow_closed_form,
    slip_flow_numeric,
)
from modules_pws.views import TRAJECTORY_COLUMNS, trajectory_frame, write_events_jsonl  # noqa: E402

TWO_PI = 2 * math.pi

# стик-дуга из θ = 0 при γ²x0 = 0.1 приходит в видимое касание на I⁻
FORK_X0 = 0.025


# ===== Дуги скольжения =====


def test_closed_form_at_zero_time(table_params):
    """t = 0 возвращает начальную точку."""
    z0 = State(0.2, -0.3, 1.0)
    z = slip_flow_closed_form(z0, -1, table_params, 0.0)
    assert z.x == pytest.approx(z0.x, abs=1e-14)
    assert z.y == pytest.approx(z0.y, abs=1e-14)
    assert z.theta == pytest.approx(z0.theta)


def test_closed_form_matches_adaptive_solver_example(table_params):
    """(γ=2, z0=0, σ=−1, t=0.5): замкнутая формула совпадает с DOP853."""
    z0 = State(0.0, 0.0, 0.0)
    a = slip_flow_closed_form(z0, -1, table_params, 0.5)
    b = slip_flow_numeric(z0, -1, table_params, 0.5)
    assert abs(a.x - b.x) < 1e-10
    assert abs(a.y - b.y) < 1e-10


def test_closed_form_oracle_random_cases():
    """100 случайных дуг: расхождение с адаптивным интегратором ≤ 1e-9 на [0, 2π]."""
    rng = np.random.default_rng(2024)
    ts = np.linspace(0.0, TWO_PI, 64)
    worst = 0.0
    for _ in range(100):
        gamma = rng.uniform(0.2, 5.0)
        while abs(gamma - 1.0) < 0.05:
            gamma = rng.uniform(0.2, 5.0)
        p = Params(gamma=gamma, mu_s=1.1, mu_d=0.4)
        z0 = State(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, TWO_PI))
        sigma = int(rng.choice([-1, 1]))
        exact = SlipArc.build(z0, sigma, p).states(ts)
        numeric = NumericSlipArc.build(z0, sigma, p, TWO_PI).states(ts)
        worst = max(worst, float(np.max(np.abs(exact[:, :2] - numeric[:, :2]))))
    assert worst <= 1e-9


def test_resonance_guard():
    """Внутри полосы |γ − 1| замкнутая формула запрещена, slip_flow считает численно."""
    p = Params(gamma=1.0005, mu_s=1.1, mu_d=0.4)
    z0 = State(0.1, 0.0, 0.0)
    with pytest.raises(ResonanceGuardError):
        slip_flow_closed_form(z0, 1, p, 1.0)
    z = slip_flow(z0, 1, p, 1.0)
    assert z == slip_flow_numeric(z0, 1, p, 1.0)


# ===== События =====


def test_stick_escape_at_asin(table_params):
    """γ²x0 = 0.2, μ_s = 1.1: выход при sin θ = 0.9."""
    ev = next_event(State(0.05, 0.0, 0.0), FieldBranch.STICK, table_params)
    assert ev.kind is EventKind.STICK_TO_SLIP_ONSET
    assert ev.time == pytest.approx(math.asin(0.9), abs=1e-10)
    assert xi(ev.state.x, ev.state.theta, table_params) == pytest.approx(1.1, abs=1e-10)


def test_stick_arc_never_escapes(table_params):
    """γ²x0 = 0: |sin θ| ≤ 1 < μ_s, события нет."""
    with pytest.raises(NoEventWithinHorizonError):
        next_event(State(0.0, 0.0, 0.0), FieldBranch.STICK, table_params)


@pytest.mark.parametrize("g2x", [0.11, 0.5, 1.0, -0.5, -1.05])
def test_stick_arc_escapes_in_finite_time(table_params, g2x):
    """При 0.11 ≤ |γ²x0| < μ_s дуга залипания уходит за один период."""
    ev = next_event(State(g2x / table_params.gamma2, 0.0, 0.0), FieldBranch.STICK, table_params)
    assert 0.0 < ev.time < TWO_PI


def test_low_static_friction_has_no_periodic_sticking():
    """μ_s = 0.9: ни одна дуга залипания не живёт весь период."""
    p = Params(gamma=2.0, mu_s=0.9, mu_d=0.4)
    for g2x in np.linspace(-0.85, 0.85, 9):
        ev = next_event(State(g2x / p.gamma2, 0.0, 0.0), FieldBranch.STICK, p)
        assert ev.time < TWO_PI


# ===== Решения =====


def test_backward_time_rejected(table_params):
    """Обратное время не поддерживается."""
    with pytest.raises(BackwardTimeError):
        integrate_stiction(State(0.0, 0.0, 0.0), -1.0, BranchPolicy.STICK_FIRST, table_params)


def test_pure_stick_circle(table_params):
    """z0 = 0: решение остаётся на листе залипания весь период и регулярно."""
    traj = integrate_stiction(State(0.0, 0.0, 0.0), TWO_PI, None, table_params)
    assert isinstance(traj, Trajectory)
    assert traj.events == []
    assert np.all(traj.states[:, 1] == 0.0)
    assert np.all(traj.states[:, 0] == 0.0)
    assert is_regular(traj)


def test_periodic_leaf_survives_fifty_periods(table_params):
    """|γ²x0| ≤ 0.09 — лист периодичен."""
    for g2x in (0.09, -0.09):
        traj = integrate_stiction(State(g2x / 4.0, 0.0, 0.0), 50 * TWO_PI, None, table_params)
        assert traj.events == []
        assert [a.branch for a in traj.arcs] == [FieldBranch.STICK]


def test_crossing_region_enters_backward_slip(table_params):
    """z0 в Σ_c⁻ (ξ > μ_s): сразу уходит в G⁻."""
    traj = integrate_stiction(State(0.3, 0.0, 0.0), 1.0, None, table_params, sample_dt=0.01)
    assert traj.arcs[0].branch is FieldBranch.MINUS
    assert traj.state_at(0.05).y < 0.0


def test_caratheodory_residual(table_params):
    """На каждой гладкой дуге z(t1) − z(t0) − ∫Z ds ≈ 0."""
    traj = integrate_stiction(State(0.3, 0.0, 0.0), TWO_PI, None, table_params)
    residuals = caratheodory_residual(traj, table_params)
    assert residuals
    assert max(residuals) <= 1e-8


def test_events_are_time_ordered_and_continuous(table_params):
    """События упорядочены, в точках событий решение непрерывно."""
    traj = integrate_stiction(State(0.3, 0.0, 0.0), 2 * TWO_PI, None, table_params)
    times = [e.time for e in traj.events]
    assert times == sorted(times)
    for a, b in zip(traj.arcs, traj.arcs[1:]):
        end = a.state_at(a.t1)
        start = b.z0
        assert abs(end.x - start.x) < 1e-9
        assert abs(end.y - start.y) < 1e-9


def test_symmetry_closure(table_params):
    """integrate(S(z0)) = S(integrate(z0)) для регулярного решения."""
    z0 = State(0.3, 0.0, 0.0)
    a = integrate_stiction(z0, TWO_PI, None, table_params)
    b = integrate_stiction(symmetry_map(z0), TWO_PI, None, table_params)
    assert is_regular(a)
    assert b.end_state.distance(symmetry_map(a.end_state)) < 1e-8
    assert len(a.events) == len(b.events)


def test_enumerate_both_forks_at_visible_tangency(table_params):
    """Дуга залипания в I⁻: ровно две ветви, расходящиеся больше чем на 0.1."""
    tree = integrate_stiction(State(FORK_X0, 0.0, 0.0), math.pi, BranchPolicy.ENUMERATE_BOTH, table_params)
    assert isinstance(tree, StictionTree)
    assert tree.forks == 1
    branches = tree.branches()
    assert len(branches) == 2
    assert branches[0].end_state.distance(branches[1].end_state) > 0.1
    assert not is_regular(tree)
    hit = branches[0].events[0]
    assert hit.kind is EventKind.SINGULAR_HIT
    assert hit.time == pytest.approx(math.pi / 2, abs=1e-10)


def test_enumerate_both_regular_start_single_branch(table_params):
    """Регулярное начальное условие даёт одну ветвь."""
    tree = integrate_stiction(State(0.0, 0.0, 0.0), TWO_PI, BranchPolicy.ENUMERATE_BOTH, table_params)
    assert tree.forks == 0
    assert len(tree) == 1
    assert is_regular(tree)


def test_stick_first_records_singular_warning(table_params):
    """StickFirst не теряет развилку молча: событие и предупреждение в журнале."""
    traj = integrate_stiction(State(FORK_X0, 0.0, 0.0), math.pi, None, table_params)
    assert any(e.kind is EventKind.SINGULAR_HIT for e in traj.events)
    assert traj.warnings
    assert not is_regular(traj)
    assert traj.end_state.x == pytest.approx(FORK_X0)


def test_slip_first_departs_at_fork(table_params):
    """SlipFirst уходит скольжением назад в точке развилки."""
    traj = integrate_stiction(State(FORK_X0, 0.0, 0.0), math.pi, BranchPolicy.SLIP_FIRST, table_params)
    assert [a.branch for a in traj.arcs][:2] == [FieldBranch.STICK, FieldBranch.MINUS]


# ===== Выгрузка =====


def test_trajectory_frame_and_events(table_params, tmp_path):
    """CSV-таблица с метками областей и журнал событий."""
    traj = integrate_stiction(State(0.3, 0.0, 0.0), TWO_PI, None, table_params)
    df = trajectory_frame(traj, table_params)
    assert list(df.columns) == TRAJECTORY_COLUMNS
    assert len(df) == len(traj.times)
    path = write_events_jsonl(traj, str(tmp_path / "events.jsonl"))
    assert path is not None
    with open(path, encoding="utf-8") as f:
        assert len(f.readlines()) == len(traj.events)
