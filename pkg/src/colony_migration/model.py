"""Core population model: parameters, states, and the switched vector fields.

An emigrating colony's active workforce splits into searchers (S), assessors
(A), tandem-run leaders (L), and transport carriers (C); passive workers (P)
are ferried to the candidate site by carriers. Recruitment switches from
tandem running to transport once the active population at the candidate site
(A + L + C) passes the quorum threshold. Below quorum the leader-to-carrier
channel is closed, above it the channel is open, so the flow is piecewise
smooth across the quorum surface.

Everything in this module is a pure function of immutable value types and is
safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

__all__ = [
    "RATE_BAND",
    "ValidationError",
    "InvalidStateError",
    "RateParams",
    "ColonyConfig",
    "ActiveState",
    "FullState",
    "Branch",
    "PersistenceBounds",
    "active_rates",
    "full_rates",
    "vector_field",
    "full_vector_field",
    "switching_value",
    "active_sum_rate",
    "crossing_indicator",
    "resolve_branch",
    "persistence_bounds",
]

# Admissible band for every behavioral rate; a sanity guard wider than any
# empirically reported range.
RATE_BAND = (1e-6, 1e3)


class ValidationError(ValueError):
    """A parameter set, configuration, or state violates its documented bounds."""


class InvalidStateError(ValidationError):
    """A state lies outside the admissible population simplex."""


@dataclass(frozen=True)
class RateParams:
    """Behavioral rate constants.

    The alpha rates are per-capita transition rates (1/min); the beta rates
    are pairwise contact-recruitment rates (1/(min*ant)).
    """

    alpha_sa: float  # independent discovery: searcher -> assessor
    alpha_as: float  # assessor -> searcher
    alpha_al: float  # assessor -> leader
    alpha_ls: float  # leader -> searcher
    alpha_lc: float  # leader -> carrier, active only above quorum
    alpha_cs: float  # carrier -> searcher
    beta_ls: float   # leader-contact recruitment of searchers
    beta_cs: float   # carrier-contact recruitment of searchers

    def __post_init__(self) -> None:
        lo, hi = RATE_BAND
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValidationError(f"{f.name} must be a positive finite rate, got {value!r}")
            if not lo <= value <= hi:
                raise ValidationError(f"{f.name}={value!r} outside admissible band [{lo}, {hi}]")


@dataclass(frozen=True)
class ColonyConfig:
    """Colony size, active fraction, and quorum threshold.

    Populations are continuous (the ODE idealization), so ``n_total`` and
    ``theta`` need not be integers.
    """

    n_total: float  # total workers in the colony
    rho: float      # active fraction, in (0, 1)
    theta: float    # quorum threshold at the candidate site, >= 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.n_total) and self.n_total > 0.0):
            raise ValidationError(f"n_total must be positive, got {self.n_total!r}")
        if not (math.isfinite(self.rho) and 0.0 < self.rho < 1.0):
            raise ValidationError(f"rho must lie strictly inside (0, 1), got {self.rho!r}")
        if not (math.isfinite(self.theta) and self.theta >= 0.0):
            raise ValidationError(f"theta must be nonnegative, got {self.theta!r}")

    @property
    def active_total(self) -> float:
        """Active workforce size M = rho * n_total."""
        return self.rho * self.n_total

    @property
    def passive_total(self) -> float:
        """Passive population (1 - rho) * n_total available for transport."""
        return (1.0 - self.rho) * self.n_total


@dataclass(frozen=True)
class ActiveState:
    """Active-population coordinates (A, L, C) of the reduced system."""

    a: float  # assessors
    l: float  # leaders
    c: float  # carriers

    def __post_init__(self) -> None:
        for name in ("a", "l", "c"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValidationError(f"{name} must be a nonnegative count, got {value!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.l, self.c)

    @property
    def total(self) -> float:
        return self.a + self.l + self.c


@dataclass(frozen=True)
class FullState:
    """Full coordinates (S, A, L, C, P) including searchers and moved passives."""

    s: float
    a: float
    l: float
    c: float
    p: float

    def __post_init__(self) -> None:
        for name in ("s", "a", "l", "c", "p"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValidationError(f"{name} must be a nonnegative count, got {value!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.s, self.a, self.l, self.c, self.p)

    @property
    def active(self) -> ActiveState:
        return ActiveState(self.a, self.l, self.c)

    @property
    def active_total(self) -> float:
        return self.s + self.a + self.l + self.c


class Branch(Enum):
    """The two smooth regimes of the switched flow.

    S1 is the below-quorum regime (tandem running only, failed-emigration
    branch); S2 is the above-quorum regime with the transport channel open
    (successful-emigration branch).
    """

    S1 = "S1"
    S2 = "S2"

    @property
    def q1(self) -> float:
        """Recruitment-switch indicator: 0 below quorum, 1 above."""
        return 0.0 if self is Branch.S1 else 1.0


@dataclass(frozen=True)
class PersistenceBounds:
    """Lower bounds on the long-run searcher, assessor, and leader counts."""

    epsilon: float    # liminf S
    epsilon_a: float  # liminf A
    epsilon_l: float  # liminf L


# --------------------------------------------------------------------------
# Vector fields.  The array-friendly kernels below accept scalars or numpy
# arrays (broadcasting elementwise); the typed wrappers validate and unpack
# the value types.
# --------------------------------------------------------------------------

def active_rates(q1, a, l, c, m, params: RateParams):
    """Rates of change (dA, dL, dC) of the reduced system with total M.

    ``q1`` is the recruitment-switch indicator (0 or 1, scalar or array).
    """
    w = params.alpha_sa + params.beta_ls * l + params.beta_cs * c
    spare = m - a - l - c
    da = w * spare - (params.alpha_as + params.alpha_al) * a
    dl = params.alpha_al * a - (params.alpha_lc * q1 + params.alpha_ls) * l
    dc = params.alpha_lc * q1 * l - params.alpha_cs * c
    return da, dl, dc


def full_rates(q1, s, a, l, c, p, params: RateParams, passive_total):
    """Rates of change (dS, dA, dL, dC, dP) of the full system."""
    contact = params.beta_ls * s * l + params.beta_cs * s * c
    ds = (-params.alpha_sa * s - contact
          + params.alpha_as * a + params.alpha_ls * l + params.alpha_cs * c)
    da = params.alpha_sa * s + contact - (params.alpha_as + params.alpha_al) * a
    dl = params.alpha_al * a - (params.alpha_lc * q1 + params.alpha_ls) * l
    dc = params.alpha_lc * q1 * l - params.alpha_cs * c
    dp = params.beta_cs * c * (passive_total - p)
    return ds, da, dl, dc, dp


def _check_active_budget(total: float, m: float) -> None:
    if total > m + 1e-9 * max(1.0, m):
        raise InvalidStateError(f"active populations sum to {total}, exceeding the workforce {m}")


def vector_field(branch: Branch, state: ActiveState, params: RateParams,
                 cfg: ColonyConfig) -> tuple[float, float, float]:
    """Rate of change of (A, L, C) under the given branch of the reduced system."""
    m = cfg.active_total
    _check_active_budget(state.total, m)
    return active_rates(branch.q1, state.a, state.l, state.c, m, params)


def full_vector_field(state: FullState, params: RateParams, cfg: ColonyConfig,
                      branch: Branch | None = None) -> tuple[float, float, float, float, float]:
    """Rate of change of (S, A, L, C, P) of the full system.

    The branch defaults to the sign of the switching value at ``state``;
    pass ``branch`` explicitly to evaluate exactly on the quorum surface.
    """
    m = cfg.active_total
    _check_active_budget(state.active_total, m + 1e-9 * max(1.0, m))
    if state.p > cfg.passive_total + 1e-9 * max(1.0, cfg.n_total):
        raise InvalidStateError(f"p={state.p} exceeds the passive population {cfg.passive_total}")
    if branch is None:
        branch = resolve_branch(state.active, params, cfg)
    return full_rates(branch.q1, state.s, state.a, state.l, state.c, state.p,
                      params, cfg.passive_total)


def switching_value(state: ActiveState, cfg: ColonyConfig) -> float:
    """Signed quorum gap H = A + L + C - theta; negative in S1, positive in S2."""
    return state.total - cfg.theta


def active_sum_rate(state: ActiveState, params: RateParams, cfg: ColonyConfig) -> float:
    """d(A+L+C)/dt, identical under both branches (the switch terms cancel)."""
    w = params.alpha_sa + params.beta_ls * state.l + params.beta_cs * state.c
    spare = cfg.active_total - state.total
    return (w * spare - params.alpha_as * state.a
            - params.alpha_ls * state.l - params.alpha_cs * state.c)


def crossing_indicator(state: ActiveState, params: RateParams, cfg: ColonyConfig) -> float:
    """Product of the quorum-surface normal speeds of the two branches.

    Because both branches share the same normal speed, the product is a
    perfect square and never negative: the surface carries only transversal
    crossings, never sliding motion.
    """
    g = active_sum_rate(state, params, cfg)
    return g * g


def resolve_branch(state: ActiveState, params: RateParams, cfg: ColonyConfig) -> Branch:
    """Branch owning ``state``: by the sign of the quorum gap, or, exactly on
    the surface, by the direction the shared normal speed pushes."""
    h = switching_value(state, cfg)
    if h < 0.0:
        return Branch.S1
    if h > 0.0:
        return Branch.S2
    return Branch.S2 if active_sum_rate(state, params, cfg) > 0.0 else Branch.S1


def persistence_bounds(params: RateParams, cfg: ColonyConfig) -> PersistenceBounds:
    """Closed-form floors on the long-run S, A, and L populations.

    With beta the largest recruitment rate and sigma the smallest return rate
    into the searching group, at least ``epsilon`` searchers remain outside
    in the long run, which in turn keeps assessor and leader counts above
    strictly positive floors.
    """
    m = cfg.active_total
    beta = max(params.beta_ls, params.beta_cs)
    sigma = min(params.alpha_as, params.alpha_ls, params.alpha_cs)
    eps = m / (params.alpha_sa / sigma + 1.0 + beta * m / sigma)
    eps_a = params.alpha_sa * eps / (params.alpha_as + params.alpha_al)
    eps_l = params.alpha_al * eps_a / (params.alpha_lc + params.alpha_ls)
    return PersistenceBounds(epsilon=eps, epsilon_a=eps_a, epsilon_l=eps_l)
