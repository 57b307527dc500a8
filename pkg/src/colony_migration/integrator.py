"""Adaptive integration of the switched flow with located quorum crossings.

Each smooth branch is integrated with an embedded Runge-Kutta 5(4) pair; a
terminal event on the signed quorum gap locates each surface hit by
root-finding on the solver's interpolant. Because the surface carries only
transversal crossings (the shared normal speed is nonzero away from a
measure-zero set), the integrator flips the branch at the located state and
restarts; there is no sliding mode to handle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp

from .equilibria import EquilibriumKind, boundary_equilibrium, interior_equilibrium
from .model import (
    ActiveState,
    Branch,
    ColonyConfig,
    FullState,
    RateParams,
    ValidationError,
    active_rates,
    full_rates,
    resolve_branch,
)

__all__ = [
    "IntegrationError",
    "StepBudgetExhausted",
    "IntegrationConfig",
    "Crossing",
    "Trajectory",
    "VerdictKind",
    "LongRunVerdict",
    "integrate",
    "long_run_verdict",
]

# Raw components this far below zero are integrator round-off and are clamped
# when recorded; anything lower is a real positivity violation and is kept.
CLAMP_BAND = 1e-9


class IntegrationError(RuntimeError):
    """Integration aborted; the message carries diagnostics."""


class StepBudgetExhausted(IntegrationError):
    pass


@dataclass(frozen=True)
class IntegrationConfig:
    """Tolerances, horizon, and event-handling knobs."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_max: float = 1e4
    max_steps: int = 5_000_000
    event_tol: float = 1e-10     # time tolerance for crossing location
    min_event_gap: float = 1e-9  # crossings closer than this are round-off duplicates

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "t_max", "event_tol", "min_event_gap"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")
        if self.max_steps <= 0:
            raise ValidationError("max_steps must be positive")


@dataclass(frozen=True)
class Crossing:
    """A located quorum-surface crossing."""

    t: float
    direction: str  # "S1->S2" or "S2->S1"


@dataclass(frozen=True)
class Trajectory:
    """Sampled piecewise trajectory; immutable once produced.

    ``states`` rows follow ``columns`` ("A","L","C" for reduced runs,
    "S","A","L","C","P" for full runs). Between consecutive crossings the
    governing branch is constant; ``initial_branch`` plus the crossing list
    determines it everywhere.
    """

    times: np.ndarray
    states: np.ndarray
    columns: tuple[str, ...]
    crossings: tuple[Crossing, ...]
    initial_branch: Branch
    final_branch: Branch
    min_component_raw: float = 0.0
    n_steps: int = 0

    def __post_init__(self) -> None:
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def active_history(self) -> np.ndarray:
        """(n, 3) view of the (A, L, C) columns."""
        i = self.columns.index("A")
        return self.states[:, i:i + 3]


class VerdictKind(Enum):
    CONVERGED = "converged"
    OSCILLATION = "oscillation"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class LongRunVerdict:
    """Outcome of a finished run: settled, oscillating, or neither."""

    kind: VerdictKind
    equilibrium: EquilibriumKind | None = None
    period: float | None = None
    tail_crossings: int = 0
    final_distance: float | None = None
    deriv_norm: float = 0.0


def _clamped(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    out[(out < 0.0) & (out > -CLAMP_BAND)] = 0.0
    return out


def integrate(initial: ActiveState | FullState, params: RateParams, cfg: ColonyConfig,
              icfg: IntegrationConfig = IntegrationConfig()) -> Trajectory:
    """Integrate from ``initial`` to ``icfg.t_max``, locating every quorum crossing.

    Accepts a reduced active state (3 coordinates, workforce M = rho*N) or a
    full state (5 coordinates). The trajectory is sampled at the solver's
    accepted steps plus every located crossing; recorded samples have tiny
    negative round-off clamped to zero, with the most negative raw value kept
    for diagnostics.

    Raises:
        IntegrationError: the step budget is exhausted, or the solver fails
            (step underflow signals stiffness or chattering; neither is
            expected for admissible rates).
    """
    if isinstance(initial, FullState):
        if initial.p > cfg.passive_total + 1e-9 * max(1.0, cfg.n_total):
            raise ValidationError("initial p exceeds the passive population")
        y0 = np.array(initial.as_tuple(), dtype=float)
        columns = ("S", "A", "L", "C", "P")
        a_slice = slice(1, 4)
        active0 = initial.active
    else:
        y0 = np.array(initial.as_tuple(), dtype=float)
        columns = ("A", "L", "C")
        a_slice = slice(0, 3)
        active0 = initial
    if active0.total > cfg.active_total + 1e-9 * max(1.0, cfg.active_total):
        raise ValidationError("initial active populations exceed the workforce")

    theta = cfg.theta
    m = cfg.active_total
    passive_total = cfg.passive_total
    full = len(columns) == 5

    # Specialized closures with the rate constants hoisted to locals; these
    # must stay expression-for-expression identical to model.full_rates and
    # model.active_rates (asserted in the test suite).
    asa, aas, aal = params.alpha_sa, params.alpha_as, params.alpha_al
    als, alc, acs = params.alpha_ls, params.alpha_lc, params.alpha_cs
    bls, bcs = params.beta_ls, params.beta_cs

    def rhs(branch: Branch):
        lam = alc * branch.q1
        if full:
            def f(_t, y):
                s, a, l, c, p = y
                contact = bls * s * l + bcs * s * c
                return (-asa * s - contact + aas * a + als * l + acs * c,
                        asa * s + contact - (aas + aal) * a,
                        aal * a - (lam + als) * l,
                        lam * l - acs * c,
                        bcs * c * (passive_total - p))
        else:
            def f(_t, y):
                a, l, c = y
                w = asa + bls * l + bcs * c
                spare = m - a - l - c
                return (w * spare - (aas + aal) * a,
                        aal * a - (lam + als) * l,
                        lam * l - acs * c)
        return f

    if full:
        def quorum_gap(_t, y):
            return y[1] + y[2] + y[3] - theta
    else:
        def quorum_gap(_t, y):
            return y[0] + y[1] + y[2] - theta

    branch = resolve_branch(active0, params, cfg)
    initial_branch = branch
    t = 0.0
    times: list[np.ndarray] = []
    states: list[np.ndarray] = []
    crossings: list[Crossing] = []
    min_raw = 0.0
    n_steps = 0
    first_step = None  # carried across crossings: the flow stays equally smooth

    while t < icfg.t_max:
        quorum_gap.terminal = True
        # From inside S1 only an upward crossing can occur, and vice versa;
        # constraining the direction also keeps a restart exactly on the
        # surface from retriggering at t + 0.
        quorum_gap.direction = 1.0 if branch is Branch.S1 else -1.0
        sol = solve_ivp(rhs(branch), (t, icfg.t_max), y0, method="RK45",
                        rtol=icfg.rel_tol, atol=icfg.abs_tol, events=quorum_gap,
                        first_step=first_step)
        if sol.status == -1:
            raise IntegrationError(
                f"solver failed at t={sol.t[-1]:.6g} in branch {branch.value}: {sol.message}")
        n_steps += len(sol.t) - 1
        if n_steps > icfg.max_steps:
            raise StepBudgetExhausted(f"exceeded {icfg.max_steps} steps at t={sol.t[-1]:.6g}")

        seg_t = sol.t if not times else sol.t[1:]
        seg_y = sol.y.T if not times else sol.y.T[1:]
        if seg_t.size:
            min_raw = min(min_raw, float(seg_y.min()))
            times.append(seg_t)
            states.append(_clamped(seg_y))

        if sol.status == 0:  # reached t_max
            break

        t_cross = float(sol.t_events[0][0])
        if len(sol.t) >= 3:
            # Seed the restart with the last full accepted step; the final
            # interval is truncated by the event and would be too small.
            h_prev = float(sol.t[-2] - sol.t[-3])
            remaining = icfg.t_max - t_cross
            first_step = min(h_prev, remaining) if h_prev > 0.0 and remaining > 0.0 else None
        else:
            first_step = None
        y_cross = sol.y_events[0][0]
        min_raw = min(min_raw, float(y_cross.min()))
        y_cross = _clamped(y_cross)
        new_branch = Branch.S2 if branch is Branch.S1 else Branch.S1
        if crossings and t_cross - crossings[-1].t < icfg.min_event_gap:
            # Numerically duplicate event pair: cancel both records; the two
            # branch flips annihilate. Genuine dynamics cannot re-cross this
            # fast because every crossing is transversal.
            crossings.pop()
        else:
            crossings.append(Crossing(t=t_cross, direction=f"{branch.value}->{new_branch.value}"))
        if times and not math.isclose(float(times[-1][-1]), t_cross, rel_tol=0.0, abs_tol=1e-12):
            # Terminal events normally end the reported samples at the event;
            # guard against the crossing state missing from the record.
            times.append(np.array([t_cross]))
            states.append(y_cross[None, :].copy())
        branch = new_branch
        t = t_cross
        y0 = y_cross

    return Trajectory(
        times=np.concatenate(times),
        states=np.vstack(states),
        columns=columns,
        crossings=tuple(crossings),
        initial_branch=initial_branch,
        final_branch=branch,
        min_component_raw=min_raw,
        n_steps=n_steps,
    )


def _deriv_norm(traj: Trajectory, params: RateParams, cfg: ColonyConfig) -> float:
    y = traj.final_state()
    if len(traj.columns) == 5:
        rates = full_rates(traj.final_branch.q1, *y, params, cfg.passive_total)
    else:
        rates = active_rates(traj.final_branch.q1, *y, cfg.active_total, params)
    return float(np.linalg.norm(rates))


def long_run_verdict(traj: Trajectory, params: RateParams, cfg: ColonyConfig, *,
                     deriv_tol: float = 1e-8, dist_rtol: float = 1e-5,
                     min_tail_crossings: int = 20, max_cv: float = 0.2) -> LongRunVerdict:
    """Classify a finished trajectory.

    Converged: the final derivative norm is below ``deriv_tol`` and the final
    active state sits within ``dist_rtol * rho * N`` of one of the two
    closed-form equilibria (which one is reported). Oscillation: the tail
    half of the run contains at least ``min_tail_crossings`` quorum crossings
    whose period estimates (same-direction crossing gaps, robust to
    asymmetric time spent on the two sides of the surface) vary by less than
    ``max_cv``. Anything else is undetermined.
    """
    active = traj.active_history()[-1]
    deriv = _deriv_norm(traj, params, cfg)
    candidates = (boundary_equilibrium(params, cfg), interior_equilibrium(params, cfg))
    dists = [float(np.linalg.norm(active - np.array(r.coords.as_tuple()))) for r in candidates]
    best = int(np.argmin(dists))
    if deriv < deriv_tol and dists[best] < dist_rtol * cfg.active_total:
        return LongRunVerdict(kind=VerdictKind.CONVERGED,
                              equilibrium=candidates[best].kind,
                              final_distance=dists[best], deriv_norm=deriv)

    tail_start = traj.t_end / 2.0
    tail = np.array([c.t for c in traj.crossings if c.t >= tail_start])
    if tail.size >= min_tail_crossings:
        periods = tail[2:] - tail[:-2]
        cv = float(np.std(periods) / np.mean(periods))
        if cv < max_cv:
            return LongRunVerdict(kind=VerdictKind.OSCILLATION,
                                  period=float(np.mean(periods)),
                                  tail_crossings=int(tail.size), deriv_norm=deriv)
    return LongRunVerdict(kind=VerdictKind.UNDETERMINED,
                          tail_crossings=int(tail.size), deriv_norm=deriv,
                          final_distance=dists[best])
