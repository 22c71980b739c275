# modules_pws/integrator.py
"""
Событийный интегратор решений с трением покоя.

Решение собирается из дуг залипания (Z_s) и скольжения (Z±), которые
переключаются только на ∂Σ_c± или при трансверсальном пересечении y = 0.
В точках прямой неединственности (SINGULAR_HIT) интегратор либо применяет
политику (StickFirst / SlipFirst), либо строит дерево всех продолжений.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad

from config_package.constants import BranchPolicy, EventKind, FieldBranch, RegionLabel, TangencyLabel
from config_package.settings import settings
from modules_common.errors import BackwardTimeError
from modules_model.params import TWO_PI, Params, State
from modules_model.services import classify, forward_singular_set, sticking_points_inward, xi
from modules_pws.events import (
    MIN_EVENT_TIME,
    Event,
    first_landing,
    slip_hit_event,
    stick_exit,
    stick_exit_event,
)
from modules_pws.slip_flow import make_slip_arc

log = logging.getLogger("stiction-lab.pws")

# после видимого касания сканирование продолжается с этого отступа
GRAZE_SKIP = 1e-6
MAX_EVENTS = 100_000


# ── Дуги и траектории ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class Arc:
    """
    Гладкая дуга решения на [t0, t1].

    Attributes:
        branch: Поле на дуге (STICK, PLUS, MINUS)
        t0, t1: Границы дуги во времени траектории
        z0: Состояние в t0
        flow: Вычислитель дуги скольжения (None для залипания)
    """

    branch: FieldBranch
    t0: float
    t1: float
    z0: State
    flow: Any = None

    def states(self, t: np.ndarray) -> np.ndarray:
        """Состояния (N, 3) в моменты t ∈ [t0, t1]; θ не приведена."""
        tau = np.asarray(t, dtype=float) - self.t0
        if self.branch is FieldBranch.STICK:
            n = tau.shape[0]
            return np.column_stack([np.full(n, self.z0.x), np.zeros(n), self.z0.theta + tau])
        return self.flow.states(tau)

    def state_at(self, t: float) -> State:
        return State.from_array(self.states(np.array([t]))[0])

    def residual(self, p: Params) -> float:
        """Невязка интегрального уравнения z(t1) − z(t0) − ∫Z(z(s))ds на дуге."""
        span = self.t1 - self.t0
        if span <= 0.0:
            return 0.0
        z1 = self.states(np.array([self.t1]))[0]
        if self.branch is FieldBranch.STICK:
            return float(max(abs(z1[0] - self.z0.x), abs(z1[1]), abs(z1[2] - self.z0.theta - span)))

        sigma = self.branch.sigma
        flow = self.flow

        def x_dot(s: float) -> float:
            return float(flow.xy(np.array(s))[1])

        def y_dot(s: float) -> float:
            x = float(flow.xy(np.array(s))[0])
            return -(p.gamma2 * x + math.sin(self.z0.theta + s)) - sigma * p.mu_d

        limit = max(200, int(span * max(1.0, p.gamma)) * 4)
        ix, _ = quad(x_dot, 0.0, span, epsabs=1e-13, epsrel=1e-12, limit=limit)
        iy, _ = quad(y_dot, 0.0, span, epsabs=1e-13, epsrel=1e-12, limit=limit)
        return float(
            max(
                abs(z1[0] - self.z0.x - ix),
                abs(z1[1] - self.z0.y - iy),
                abs(z1[2] - self.z0.theta - span),
            )
        )


def _sample_times(arcs: List[Arc], dt: float) -> List[np.ndarray]:
    out = []
    for k, arc in enumerate(arcs):
        ts = np.arange(arc.t0, arc.t1, dt)
        if ts.size == 0 or ts[-1] < arc.t1:
            ts = np.append(ts, arc.t1)
        if k > 0 and ts.size > 1:
            ts = ts[1:]
        out.append(ts)
    return out


@dataclass
class Trajectory:
    """
    Решение с трением покоя.

    Attributes:
        times: Моменты выборки
        states: Состояния (N, 3), θ ∈ [0, 2π)
        events: События в порядке времени
        arcs: Гладкие дуги (пусто для образов под отображением)
        branch_policy_used: Политика, с которой построено решение
        warnings: Записанные предупреждения
        halted: Остановка на неопределённом трении
    """

    times: np.ndarray
    states: np.ndarray
    events: List[Event]
    arcs: List[Arc]
    branch_policy_used: BranchPolicy
    warnings: List[str] = field(default_factory=list)
    halted: bool = False

    @classmethod
    def from_arcs(
        cls,
        arcs: List[Arc],
        events: List[Event],
        policy: BranchPolicy,
        warnings: Optional[List[str]] = None,
        halted: bool = False,
        sample_dt: Optional[float] = None,
        z0: Optional[State] = None,
    ) -> "Trajectory":
        dt = settings.sample_dt if sample_dt is None else sample_dt
        if arcs:
            chunks = _sample_times(arcs, dt)
            times = np.concatenate(chunks)
            states = np.vstack([a.states(ts) for a, ts in zip(arcs, chunks)])
        else:
            start = z0 if z0 is not None else (events[0].state if events else State(0.0, 0.0, 0.0))
            times = np.array([events[0].time if events else 0.0])
            states = start.as_array()[None, :]
        states[:, 2] = np.mod(states[:, 2], TWO_PI)
        return cls(
            times=times,
            states=states,
            events=list(events),
            arcs=list(arcs),
            branch_policy_used=policy,
            warnings=list(warnings or []),
            halted=halted,
        )

    @property
    def samples(self) -> List[Tuple[float, State]]:
        return [(float(t), State.from_array(z)) for t, z in zip(self.times, self.states)]

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def end_state(self) -> State:
        return State.from_array(self.states[-1])

    def state_at(self, t: float) -> State:
        """Точное состояние в момент t (по дугам), для образов — интерполяция выборки."""
        for arc in self.arcs:
            if arc.t0 - 1e-15 <= t <= arc.t1 + 1e-15:
                return arc.state_at(t)
        if self.arcs:
            raise ValueError(f"t={t} is outside [{self.times[0]}, {self.times[-1]}]")
        th = np.unwrap(self.states[:, 2])
        return State(
            float(np.interp(t, self.times, self.states[:, 0])),
            float(np.interp(t, self.times, self.states[:, 1])),
            float(np.interp(t, self.times, th)),
        )

    def states_at(self, ts: np.ndarray) -> np.ndarray:
        """Точные состояния (N, 3) на сетке ts по дугам; θ не приведена."""
        ts = np.asarray(ts, dtype=float)
        if not self.arcs:
            return np.array([self.state_at(float(t)).as_array() for t in ts])
        out = np.empty((ts.size, 3))
        filled = np.zeros(ts.size, dtype=bool)
        for arc in self.arcs:
            mask = (~filled) & (ts >= arc.t0 - 1e-15) & (ts <= arc.t1 + 1e-15)
            if np.any(mask):
                out[mask] = arc.states(ts[mask])
                filled |= mask
        if not np.all(filled):
            raise ValueError("sample times fall outside the trajectory")
        return out

    def mapped(self, transform: Callable[[State], State]) -> "Trajectory":
        """Образ траектории под отображением фазового пространства (например, S)."""
        states = np.array([transform(State.from_array(z)).as_array() for z in self.states])
        return Trajectory(
            times=self.times.copy(),
            states=states,
            events=[e.mapped(transform) for e in self.events],
            arcs=[],
            branch_policy_used=self.branch_policy_used,
            warnings=list(self.warnings),
            halted=self.halted,
        )

    def region_labels(self, p: Params) -> List[str]:
        return [classify(State.from_array(z), p).label.value for z in self.states]


@dataclass
class _Path:
    arcs: List[Arc] = field(default_factory=list)
    events: List[Event] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    halted: bool = False
    fork: Optional[Event] = None
    fork_slip: Optional[FieldBranch] = None


@dataclass
class StictionNode:
    """Участок решения до развилки и продолжения после неё."""

    path: _Path
    children: List["StictionNode"] = field(default_factory=list)


@dataclass
class StictionTree:
    """Дерево прямых продолжений при политике EnumerateBoth."""

    root: StictionNode
    forks: int
    sample_dt: float
    z0: State

    def branches(self) -> List[Trajectory]:
        """Все листовые решения, каждое от z0 до T."""
        out: List[Trajectory] = []

        def walk(node: StictionNode, arcs: List[Arc], events: List[Event], warnings: List[str], halted: bool):
            arcs = arcs + node.path.arcs
            events = events + node.path.events
            warnings = warnings + node.path.warnings
            halted = halted or node.path.halted
            if not node.children:
                out.append(
                    Trajectory.from_arcs(
                        arcs,
                        events,
                        BranchPolicy.ENUMERATE_BOTH,
                        warnings,
                        halted,
                        self.sample_dt,
                        self.z0,
                    )
                )
                return
            for child in node.children:
                walk(child, arcs, events, warnings, halted)

        walk(self.root, [], [], [], False)
        return out

    def __len__(self) -> int:
        return len(self.branches())


# ── Шаги интегратора ────────────────────────────────────────────────────────


def _slip_branch_for(boundary: Optional[RegionLabel]) -> FieldBranch:
    return FieldBranch.MINUS if boundary is RegionLabel.BOUNDARY_C_MINUS else FieldBranch.PLUS


def initial_branch(z: State, p: Params) -> Tuple[Optional[FieldBranch], Optional[Event]]:
    """
    Поле, по которому решение уходит из z.

    Returns:
        (поле, None) или (None, SINGULAR_HIT) для точки неединственности
    """
    region = classify(z, p)
    label = region.label
    if label is RegionLabel.G_PLUS or label is RegionLabel.SIGMA_C_PLUS:
        return FieldBranch.PLUS, None
    if label is RegionLabel.G_MINUS or label is RegionLabel.SIGMA_C_MINUS:
        return FieldBranch.MINUS, None
    if label is RegionLabel.SIGMA_S:
        return FieldBranch.STICK, None
    zb = z.with_y(0.0)
    i_set = forward_singular_set(zb, p)
    if i_set is not None:
        return None, Event(0.0, zb, EventKind.SINGULAR_HIT, i_set=i_set, boundary=label)
    if sticking_points_inward(zb, p):
        return FieldBranch.STICK, None
    return _slip_branch_for(label), None


def _walk(
    z: State,
    t: float,
    t_end: float,
    p: Params,
    policy: BranchPolicy,
    branch: FieldBranch,
    stop_at_fork: bool,
) -> _Path:
    """Интегрирует от (t, z) по полю branch до t_end, остановки или развилки."""
    path = _Path()
    n_events = 0
    while t < t_end - MIN_EVENT_TIME:
        if n_events >= MAX_EVENTS:
            msg = f"event limit {MAX_EVENTS} reached at t={t:.6f}"
            log.warning(msg)
            path.warnings.append(msg)
            path.halted = True
            break
        remaining = t_end - t

        if branch is FieldBranch.STICK:
            z = z.with_y(0.0)
            hit = stick_exit(z, p, remaining)
            if hit is None:
                path.arcs.append(Arc(FieldBranch.STICK, t, t_end, z))
                t = t_end
                break
            ev = stick_exit_event(z, p, hit).shifted(t)
            path.arcs.append(Arc(FieldBranch.STICK, t, ev.time, z))
            path.events.append(ev)
            n_events += 1
            t, z = ev.time, ev.state
            slip_branch = _slip_branch_for(ev.boundary)
            if ev.kind is EventKind.SINGULAR_HIT:
                if stop_at_fork:
                    path.fork, path.fork_slip = ev, slip_branch
                    break
                i_name = ev.i_set.value if ev.i_set else "?"
                msg = f"singular hit on {i_name} at t={t:.6f}, continuing by {policy.value}"
                log.warning(msg)
                path.warnings.append(msg)
                branch = slip_branch if policy is BranchPolicy.SLIP_FIRST else FieldBranch.STICK
            else:
                branch = slip_branch
            continue

        sigma = branch.sigma
        arc_flow = make_slip_arc(z, sigma, p, remaining)
        t_from = 0.0
        while True:
            hit = first_landing(arc_flow, sigma, p, remaining, t_from)
            if hit is None:
                break
            ev = slip_hit_event(arc_flow, sigma, p, hit)
            if ev.kind is EventKind.TANGENCY_GRAZE and ev.tangency is TangencyLabel.VISIBLE:
                path.events.append(ev.shifted(t))
                n_events += 1
                t_from = hit.dt + GRAZE_SKIP
                continue
            break
        if hit is None:
            path.arcs.append(Arc(branch, t, t_end, z, arc_flow))
            t = t_end
            break

        path.arcs.append(Arc(branch, t, t + hit.dt, z, arc_flow))
        ev = ev.shifted(t)
        path.events.append(ev)
        n_events += 1
        t, z = ev.time, ev.state
        if ev.kind is EventKind.UNDEFINED_FRICTION_HIT:
            msg = f"slip arc landed on |xi|=mu_s at t={t:.6f} (xi={xi(z.x, z.theta, p):.12g}), stopping"
            log.warning(msg)
            path.warnings.append(msg)
            path.halted = True
            break
        if ev.kind is EventKind.CROSSING_DOWN:
            branch = FieldBranch.MINUS
        elif ev.kind is EventKind.CROSSING_UP:
            branch = FieldBranch.PLUS
        else:
            branch = FieldBranch.STICK
            z = z.with_y(0.0)
    return path


def _enumerate(
    z: State,
    t: float,
    t_end: float,
    p: Params,
    branch: Optional[FieldBranch],
    fork: Optional[Event],
    budget: List[int],
) -> StictionNode:
    if fork is not None:
        path = _Path(events=[fork], fork=fork, fork_slip=_slip_branch_for(fork.boundary))
    else:
        assert branch is not None
        path = _walk(z, t, t_end, p, BranchPolicy.STICK_FIRST, branch, stop_at_fork=budget[0] > 0)
    node = StictionNode(path)
    if path.fork is None:
        return node
    budget[0] -= 1
    if budget[0] == 0:
        msg = "fork budget exhausted, remaining singular hits continue by stick_first"
        log.warning(msg)
        path.warnings.append(msg)
    f = path.fork
    node.children = [
        _enumerate(f.state, f.time, t_end, p, FieldBranch.STICK, None, budget),
        _enumerate(f.state, f.time, t_end, p, path.fork_slip, None, budget),
    ]
    return node


def integrate_stiction(
    z0: State,
    T: float,
    policy: Optional[BranchPolicy],
    p: Params,
    max_forks: Optional[int] = None,
    sample_dt: Optional[float] = None,
) -> Union[Trajectory, StictionTree]:
    """
    Решение с трением покоя на [0, T].

    Args:
        z0: Начальная точка
        T: Длительность (T > 0)
        policy: Политика в точках неединственности (None — StickFirst)
        p: Параметры
        max_forks: Предел числа развилок для EnumerateBoth
        sample_dt: Шаг выборки траектории

    Returns:
        Trajectory, а при EnumerateBoth — StictionTree

    Raises:
        BackwardTimeError: при T ≤ 0
    """
    if not T > 0.0:
        raise BackwardTimeError(f"integration time must be positive, got T={T}", {"T": T})
    policy = BranchPolicy.STICK_FIRST if policy is None else policy
    sample_dt = settings.sample_dt if sample_dt is None else sample_dt
    branch, fork = initial_branch(z0, p)
    log.debug(f"integrate z0={z0.as_tuple()} T={T} policy={policy.value} start={branch or 'fork'}")

    if policy is BranchPolicy.ENUMERATE_BOTH:
        limit = settings.max_forks if max_forks is None else max_forks
        budget = [limit]
        if fork is not None and limit <= 0:
            branch, fork = FieldBranch.STICK, None
        root = _enumerate(z0, 0.0, T, p, branch, fork, budget)
        forks = limit - budget[0]
        return StictionTree(root=root, forks=forks, sample_dt=sample_dt, z0=z0)

    warnings: List[str] = []
    events: List[Event] = []
    if fork is not None:
        events.append(fork)
        msg = f"initial point is singular ({fork.i_set.value if fork.i_set else '?'}), continuing by {policy.value}"
        log.warning(msg)
        warnings.append(msg)
        branch = _slip_branch_for(fork.boundary) if policy is BranchPolicy.SLIP_FIRST else FieldBranch.STICK
    assert branch is not None
    path = _walk(z0, 0.0, T, p, policy, branch, stop_at_fork=False)
    return Trajectory.from_arcs(
        path.arcs,
        events + path.events,
        policy,
        warnings + path.warnings,
        path.halted,
        sample_dt,
        z0,
    )


def is_regular(traj: Union[Trajectory, StictionTree]) -> bool:
    """True, если решение ни разу не попало в точку неединственности."""
    if isinstance(traj, StictionTree):
        return traj.forks == 0 and all(is_regular(b) for b in traj.branches())
    return not any(e.kind is EventKind.SINGULAR_HIT for e in traj.events)


def caratheodory_residual(traj: Trajectory, p: Params) -> List[float]:
    """Невязки z(t1) − z(t0) − ∫Z(z(s))ds по всем гладким дугам траектории."""
    if not traj.arcs:
        raise ValueError("trajectory has no arcs (mapped image); residual is defined on computed solutions")
    return [arc.residual(p) for arc in traj.arcs]


__all__ = [
    "Arc",
    "Trajectory",
    "StictionNode",
    "StictionTree",
    "initial_branch",
    "integrate_stiction",
    "is_regular",
    "caratheodory_residual",
]
