"""Quorum-switched colony emigration dynamics.

Simulation with located quorum crossings, closed-form equilibria with
regular/virtual classification, Routh-Hurwitz stability, regime
classification and bifurcation sweeps over colony size and quorum, and
basin-of-attraction analysis.
"""

from .model import (
    ActiveState,
    Branch,
    ColonyConfig,
    FullState,
    InvalidStateError,
    PersistenceBounds,
    RateParams,
    ValidationError,
    crossing_indicator,
    full_vector_field,
    persistence_bounds,
    resolve_branch,
    switching_value,
    vector_field,
)
from .equilibria import (
    AggregateCoefficients,
    CriticalSizes,
    DegenerateCaseError,
    EquilibriumKind,
    EquilibriumReport,
    Regime,
    Regularity,
    ThresholdCase,
    aggregate_coefficients,
    boundary_equilibrium,
    classify_regime,
    critical_sizes,
    interior_equilibrium,
    threshold_case,
)
from .stability import (
    CharPoly2,
    CharPoly3,
    Stability,
    attach_stability,
    characteristic_poly2,
    characteristic_poly3,
    jacobian,
    stability_verdict,
)
from .integrator import (
    Crossing,
    IntegrationConfig,
    IntegrationError,
    LongRunVerdict,
    Trajectory,
    VerdictKind,
    integrate,
    long_run_verdict,
)

__version__ = "0.1.0"
