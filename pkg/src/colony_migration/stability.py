"""Jacobians, characteristic polynomials, and Routh-Hurwitz stability verdicts.

Stability of the branch equilibria is decided from closed-form coefficients
of the characteristic polynomials rather than a general eigensolver: the
below-quorum equilibrium reduces to a quadratic (its carrier mode decays
independently at the carrier return rate) and the above-quorum equilibrium
to a cubic. An analytic cubic solver is provided purely as a cross-check on
the sign conditions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .equilibria import (
    EquilibriumKind,
    EquilibriumReport,
    boundary_equilibrium,
    carrier_balance_quadratic,
    interior_equilibrium,
    leader_balance_quadratic,
)
from .model import ActiveState, Branch, ColonyConfig, RateParams

__all__ = [
    "Stability",
    "CharPoly2",
    "CharPoly3",
    "jacobian",
    "characteristic_poly2",
    "characteristic_poly3",
    "routh_hurwitz_margins",
    "stability_verdict",
    "attach_stability",
    "cubic_roots",
]

# Margins this close to zero make the sign test unreliable; report
# Indeterminate instead of guessing (occurs at regime boundaries N = n1, n2).
MARGIN_TOL = 1e-10


class Stability(Enum):
    LOCALLY_STABLE = "LocallyStable"
    UNSTABLE = "Unstable"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class CharPoly2:
    """lambda^2 + a1*lambda + a0, the in-plane modes of the below-quorum branch."""

    a1: float
    a0: float


@dataclass(frozen=True)
class CharPoly3:
    """lambda^3 + b2*lambda^2 + b1*lambda + b0 at the interior equilibrium."""

    b2: float
    b1: float
    b0: float


def jacobian(branch: Branch, state: ActiveState, params: RateParams,
             cfg: ColonyConfig) -> np.ndarray:
    """Analytic 3x3 Jacobian of the branch vector field at ``state``."""
    p = params
    w = p.alpha_sa + p.beta_ls * state.l + p.beta_cs * state.c
    spare = cfg.active_total - state.total
    row_a = [-w - (p.alpha_as + p.alpha_al),
             p.beta_ls * spare - w,
             p.beta_cs * spare - w]
    if branch is Branch.S1:
        row_l = [p.alpha_al, -p.alpha_ls, 0.0]
        row_c = [0.0, 0.0, -p.alpha_cs]
    else:
        row_l = [p.alpha_al, -(p.alpha_lc + p.alpha_ls), 0.0]
        row_c = [0.0, p.alpha_lc, -p.alpha_cs]
    return np.array([row_a, row_l, row_c], dtype=float)


def _quadratic_derivative(coeffs: tuple[float, float, float], x: float) -> float:
    c2, c1, _ = coeffs
    return 2.0 * c2 * x + c1


def characteristic_poly2(params: RateParams, cfg: ColonyConfig) -> CharPoly2:
    """Quadratic characteristic coefficients at the below-quorum equilibrium.

    These are the (A, L)-plane modes; the carrier direction contributes a
    separate eigenvalue equal to minus the carrier return rate. Both
    coefficients are strictly positive for valid inputs, so the equilibrium
    is always locally stable on its own branch.
    """
    p = params
    lf = boundary_equilibrium(params, cfg).coords.l
    a1 = (p.alpha_as + p.alpha_al) + (p.alpha_sa + p.beta_ls * lf) + p.alpha_ls
    a0 = -p.alpha_al * _quadratic_derivative(leader_balance_quadratic(params, cfg), lf)
    return CharPoly2(a1=a1, a0=a0)


def characteristic_poly3(params: RateParams, cfg: ColonyConfig) -> CharPoly3:
    """Cubic characteristic coefficients at the interior equilibrium."""
    p = params
    eq = interior_equilibrium(params, cfg).coords
    w = p.alpha_sa + p.beta_ls * eq.l + p.beta_cs * eq.c
    spare = cfg.active_total - eq.total
    b2 = (p.alpha_cs + p.alpha_ls + p.alpha_as + p.alpha_al + p.alpha_lc
          + p.alpha_sa + p.beta_ls * eq.l + p.beta_cs * eq.c)
    b1 = (p.alpha_cs * (p.alpha_ls + p.alpha_as + p.alpha_al + p.alpha_lc + w)
          + (p.alpha_al + p.alpha_lc + p.alpha_ls) * w
          + (p.alpha_sa + p.beta_cs * eq.c) * spare * p.alpha_al / eq.l)
    b0 = (-p.alpha_al * p.alpha_lc
          * _quadratic_derivative(carrier_balance_quadratic(params, cfg), eq.c))
    return CharPoly3(b2=b2, b1=b1, b0=b0)


def routh_hurwitz_margins(poly: CharPoly2 | CharPoly3) -> tuple[float, ...]:
    """Quantities that must all be positive for every root to lie in the
    open left half-plane."""
    if isinstance(poly, CharPoly2):
        return (poly.a1, poly.a0)
    return (poly.b2, poly.b0, poly.b1 * poly.b2 - poly.b0)


def stability_verdict(report: EquilibriumReport, params: RateParams,
                      cfg: ColonyConfig) -> Stability:
    """Routh-Hurwitz verdict for the equilibrium on its owning branch."""
    if report.kind is EquilibriumKind.BOUNDARY_EF:
        margins = routh_hurwitz_margins(characteristic_poly2(params, cfg))
        # The out-of-plane carrier mode decays at -alpha_cs, always stable.
    else:
        margins = routh_hurwitz_margins(characteristic_poly3(params, cfg))
    if any(abs(m) <= MARGIN_TOL for m in margins):
        return Stability.INDETERMINATE
    if all(m > 0.0 for m in margins):
        return Stability.LOCALLY_STABLE
    return Stability.UNSTABLE


def attach_stability(report: EquilibriumReport, params: RateParams,
                     cfg: ColonyConfig) -> EquilibriumReport:
    """Copy of ``report`` with its stability field filled in."""
    return replace(report, stability=stability_verdict(report, params, cfg))


def cubic_roots(poly: CharPoly3) -> tuple[complex, complex, complex]:
    """Roots of the monic cubic by the trigonometric/Cardano method.

    Used only to cross-check the Routh-Hurwitz sign conditions.
    """
    b2, b1, b0 = poly.b2, poly.b1, poly.b0
    # Depressed form t^3 + p*t + q with lambda = t - b2/3.
    shift = b2 / 3.0
    p = b1 - b2 * b2 / 3.0
    q = 2.0 * b2 ** 3 / 27.0 - b2 * b1 / 3.0 + b0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:  # one real root, conjugate pair
        s = math.sqrt(disc)
        u = math.copysign(abs(-q / 2.0 + s) ** (1.0 / 3.0), -q / 2.0 + s)
        v = math.copysign(abs(-q / 2.0 - s) ** (1.0 / 3.0), -q / 2.0 - s)
        t0 = u + v
        re = -t0 / 2.0
        im = math.sqrt(3.0) / 2.0 * abs(u - v)
        roots = (complex(t0), complex(re, im), complex(re, -im))
    elif p == 0.0:  # triple root
        roots = (complex(0.0),) * 3
    else:  # three real roots
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg)
        roots = tuple(complex(r * math.cos((phi + 2.0 * math.pi * k) / 3.0))
                      for k in range(3))
    return tuple(z - shift for z in roots)  # type: ignore[return-value]
