"""Closed-form equilibria, critical colony sizes, and regime classification.

Each branch of the switched flow has exactly one equilibrium with positive
coordinates: the below-quorum branch settles with no carriers (the colony
stays put), the above-quorum branch settles with all three recruit classes
active (the colony relocates). Whether each equilibrium actually lies in the
region its branch owns is decided by two critical colony sizes n1 and n2;
their ordering as the quorum varies is governed by a critical quorum theta_c
and splits parameter space into four qualitative cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .model import ActiveState, ColonyConfig, RateParams, ValidationError

if TYPE_CHECKING:  # deferred to avoid a circular import at runtime
    from .stability import Stability

__all__ = [
    "DegenerateCaseError",
    "AggregateCoefficients",
    "EquilibriumKind",
    "Regularity",
    "Regime",
    "ThresholdCase",
    "EquilibriumReport",
    "CriticalSizes",
    "aggregate_coefficients",
    "leader_balance_quadratic",
    "carrier_balance_quadratic",
    "boundary_equilibrium",
    "interior_equilibrium",
    "critical_sizes",
    "classify_regime",
    "threshold_case",
]

# Relative tolerance for "exactly on a regime boundary" decisions; colony
# sizes and quorums span orders of magnitude, so the tolerance must scale.
BOUNDARY_RTOL = 1e-9


class DegenerateCaseError(ValidationError):
    """Rate ratios sit exactly on a boundary between qualitative cases."""


@dataclass(frozen=True)
class AggregateCoefficients:
    """Recruitment-efficiency (eta) and input-output (xi) aggregates.

    The *_1 pair describes the colony recruiting by tandem running alone,
    the *_2 pair with the transport channel open as well. All four are
    strictly positive for any valid rate set.
    """

    eta_1: float
    xi_1: float
    eta_2: float
    xi_2: float


class EquilibriumKind(Enum):
    BOUNDARY_EF = "boundary-Ef"   # no carriers; emigration fails
    INTERIOR_ES = "interior-Es"   # all recruit classes active; emigration succeeds


class Regularity(Enum):
    """Whether an equilibrium lies inside the region its own branch governs."""

    REGULAR = "regular"
    VIRTUAL = "virtual"
    BOUNDARY = "boundary"


class Regime(Enum):
    """Long-run outcome classes of the switched system."""

    FAILED_EMIGRATION = "FailedEmigration"
    SUCCESSFUL_EMIGRATION = "SuccessfulEmigration"
    UNDECIDED = "Undecided"
    BISTABLE = "Bistable"
    BOUNDARY = "Boundary"


class ThresholdCase(Enum):
    """Qualitative ordering pattern of the two critical-size curves n1(theta),
    n2(theta), determined by the carrier/leader rate ratios.

    A: n1 > n2 for every positive quorum (no undecided band anywhere).
    B: n1 < n2 for every positive quorum (no bistable band anywhere).
    C: n1 < n2 below the critical quorum, n1 > n2 above it.
    D: n1 > n2 below the critical quorum, n1 < n2 above it.
    """

    A = "A"
    B = "B"
    C = "C"
    D = "D"


@dataclass(frozen=True)
class EquilibriumReport:
    coords: ActiveState
    kind: EquilibriumKind
    regularity: Regularity
    stability: "Stability | None" = None


@dataclass(frozen=True)
class CriticalSizes:
    """Critical colony sizes and, when it exists, the critical quorum.

    ``theta_c`` is None when the rate ratios put the system in a case where
    the two critical-size curves never cross at a positive quorum.
    """

    n1: float
    n2: float
    theta_c: float | None


def aggregate_coefficients(params: RateParams) -> AggregateCoefficients:
    """Evaluate the four aggregate coefficients from the behavioral rates."""
    p = params
    base = p.alpha_sa / (p.alpha_as + p.alpha_al)
    k1 = 1.0 + p.alpha_al / p.alpha_ls
    eta_1 = 1.0 / (base * k1)
    xi_1 = (p.alpha_al * p.beta_ls / (p.alpha_ls * (p.alpha_as + p.alpha_al))) / (base * k1)

    lc_ls = p.alpha_ls + p.alpha_lc
    k2 = 1.0 + p.alpha_al / lc_ls + p.alpha_al * p.alpha_lc / (lc_ls * p.alpha_cs)
    eta_2 = 1.0 / (base * k2)
    xi_2 = ((p.beta_ls * p.alpha_al / lc_ls
             + p.beta_cs * p.alpha_al * p.alpha_lc / (p.alpha_cs * lc_ls))
            / (p.alpha_sa * k2))
    return AggregateCoefficients(eta_1=eta_1, xi_1=xi_1, eta_2=eta_2, xi_2=xi_2)


def _positive_root(xi: float, eta: float, m: float) -> float:
    """Unique positive root of xi*x^2 + (1 + eta - m*xi)*x - m = 0.

    Uses the cancellation-free quadratic form: with the constant term
    negative there is exactly one positive root, and the stable variant
    q = -(b + sign(b)*sqrt(b^2 - 4ac))/2 avoids loss of precision for
    either sign of the linear coefficient.
    """
    a = xi
    b = 1.0 + eta - m * xi
    c = -m
    disc = math.sqrt(b * b - 4.0 * a * c)
    q = -0.5 * (b + math.copysign(disc, b))
    return c / q if b > 0.0 else q / a


def leader_balance_quadratic(params: RateParams, cfg: ColonyConfig) -> tuple[float, float, float]:
    """Coefficients (c2, c1, c0) of the below-quorum leader balance in L.

    The unique positive root of c2*L^2 + c1*L + c0 is the equilibrium leader
    count of the below-quorum branch.
    """
    p = params
    m = cfg.active_total
    ratio = p.alpha_ls / p.alpha_al
    c2 = -p.beta_ls * (1.0 + ratio)
    c1 = p.beta_ls * m - p.alpha_sa * (1.0 + ratio) - (p.alpha_as + p.alpha_al) * ratio
    c0 = p.alpha_sa * m
    return c2, c1, c0


def carrier_balance_quadratic(params: RateParams, cfg: ColonyConfig) -> tuple[float, float, float]:
    """Coefficients (c2, c1, c0) of the above-quorum carrier balance in C.

    The unique positive root of c2*C^2 + c1*C + c0 is the equilibrium carrier
    count of the above-quorum branch.
    """
    p = params
    m = cfg.active_total
    recruit = p.beta_ls * p.alpha_cs / p.alpha_lc + p.beta_cs
    k = _interior_sum_factor(params)
    c2 = -recruit * k
    c1 = (m * recruit - p.alpha_sa * k
          - p.alpha_cs * (p.alpha_lc + p.alpha_ls) * (p.alpha_as + p.alpha_al)
          / (p.alpha_al * p.alpha_lc))
    c0 = p.alpha_sa * m
    return c2, c1, c0


def _interior_sum_factor(params: RateParams) -> float:
    """(A + L + C) / C at the interior equilibrium."""
    p = params
    return (1.0 + p.alpha_cs / p.alpha_lc
            + p.alpha_cs * (p.alpha_lc + p.alpha_ls) / (p.alpha_al * p.alpha_lc))


def _regularity(active_sum: float, theta: float, inside_when_below: bool) -> Regularity:
    tol = BOUNDARY_RTOL * max(1.0, theta, active_sum)
    gap = active_sum - theta
    if abs(gap) <= tol:
        return Regularity.BOUNDARY
    inside = gap < 0.0 if inside_when_below else gap > 0.0
    return Regularity.REGULAR if inside else Regularity.VIRTUAL


def boundary_equilibrium(params: RateParams, cfg: ColonyConfig) -> EquilibriumReport:
    """Equilibrium of the below-quorum branch: carriers absent.

    Regular when its active total A + L sits below the quorum (equivalently
    the colony is smaller than the critical size n1), virtual above.
    """
    agg = aggregate_coefficients(params)
    active_sum = _positive_root(agg.xi_1, agg.eta_1, cfg.active_total)  # A + L
    lf = active_sum / (1.0 + params.alpha_ls / params.alpha_al)
    af = (params.alpha_ls / params.alpha_al) * lf
    return EquilibriumReport(
        coords=ActiveState(a=af, l=lf, c=0.0),
        kind=EquilibriumKind.BOUNDARY_EF,
        regularity=_regularity(active_sum, cfg.theta, inside_when_below=True),
    )


def interior_equilibrium(params: RateParams, cfg: ColonyConfig) -> EquilibriumReport:
    """Equilibrium of the above-quorum branch: all recruit classes positive.

    Regular when its active total A + L + C exceeds the quorum (equivalently
    the colony is larger than the critical size n2), virtual below.
    """
    agg = aggregate_coefficients(params)
    active_sum = _positive_root(agg.xi_2, agg.eta_2, cfg.active_total)  # A + L + C
    cs = active_sum / _interior_sum_factor(params)
    ls = (params.alpha_cs / params.alpha_lc) * cs
    as_ = ((params.alpha_lc + params.alpha_ls) / params.alpha_al) * ls
    return EquilibriumReport(
        coords=ActiveState(a=as_, l=ls, c=cs),
        kind=EquilibriumKind.INTERIOR_ES,
        regularity=_regularity(active_sum, cfg.theta, inside_when_below=False),
    )


def _critical_quorum(params: RateParams) -> float | None:
    """Quorum at which the two critical-size curves cross, if one exists."""
    r_alpha = params.alpha_cs / params.alpha_ls
    r_beta = params.beta_cs / params.beta_ls
    num = 1.0 - r_alpha
    den = r_alpha - r_beta
    if num == 0.0 or den == 0.0 or (num > 0.0) != (den > 0.0):
        return None
    return params.alpha_sa * num / (params.beta_ls * den)


def critical_sizes(params: RateParams, cfg: ColonyConfig) -> CriticalSizes:
    """Critical colony sizes n1, n2 at the configured quorum, plus theta_c."""
    agg = aggregate_coefficients(params)
    theta, rho = cfg.theta, cfg.rho
    n1 = theta / rho + theta * agg.eta_1 / (rho * (1.0 + agg.xi_1 * theta))
    n2 = theta / rho + theta * agg.eta_2 / (rho * (1.0 + agg.xi_2 * theta))
    return CriticalSizes(n1=n1, n2=n2, theta_c=_critical_quorum(params))


def classify_regime(params: RateParams, cfg: ColonyConfig) -> Regime:
    """Long-run outcome class from the position of N between n1 and n2.

    Below both critical sizes the colony stays (only the failed equilibrium
    is attracting); above both it relocates; with n1 < N < n2 neither branch
    equilibrium is available and the active population oscillates around the
    quorum; with n2 < N < n1 both are available and the outcome depends on
    initial recruiter counts.
    """
    sizes = critical_sizes(params, cfg)
    n = cfg.n_total
    lo, hi = min(sizes.n1, sizes.n2), max(sizes.n1, sizes.n2)
    tol = BOUNDARY_RTOL * max(1.0, hi)
    if abs(n - sizes.n1) <= tol or abs(n - sizes.n2) <= tol:
        return Regime.BOUNDARY
    if n < lo:
        return Regime.FAILED_EMIGRATION
    if n > hi:
        return Regime.SUCCESSFUL_EMIGRATION
    return Regime.UNDECIDED if sizes.n1 < sizes.n2 else Regime.BISTABLE


def threshold_case(params: RateParams) -> ThresholdCase:
    """Classify the ordering pattern of n1(theta) versus n2(theta).

    Raises DegenerateCaseError when the carrier/leader ratios sit on a case
    boundary (a ratio equal to one, or the two ratios coinciding).
    """
    r_alpha = params.alpha_cs / params.alpha_ls
    r_beta = params.beta_cs / params.beta_ls
    if abs(r_alpha - 1.0) <= 1e-12 or abs(r_beta - 1.0) <= 1e-12:
        raise DegenerateCaseError("carrier/leader transition-rate ratio sits on a case boundary")
    if abs(r_alpha - r_beta) <= 1e-12:
        raise DegenerateCaseError("transition and recruitment ratios coincide")
    if r_alpha < min(1.0, r_beta):
        return ThresholdCase.A
    if r_alpha > max(1.0, r_beta):
        return ThresholdCase.B
    if 1.0 < r_alpha < r_beta:
        return ThresholdCase.C
    return ThresholdCase.D
