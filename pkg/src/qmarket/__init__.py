"""Numerical engine for quantum market games.

Strategies are superpositions of Gaussian amplitudes over log-price; tactics
superpose a strategy with its shifted copy; the supply representation is the
Fourier transform of the demand one; Wigner slices give conditional demand
curves, which can be non-monotone (Giffen behaviour).
"""

from .curves import (
    Curve,
    GiffenReport,
    Orientation,
    conditional_demand,
    demand_curve,
    detect_giffen,
    integrated_anomaly_check,
    supply_curve,
)
from .errors import (
    DegenerateSliceError,
    InvalidParameterError,
    InvalidRepresentationError,
    OutOfDomainError,
    QMarketError,
    SignIndefiniteError,
    TruncationWarning,
    ZeroAmplitudeError,
)
from .game import (
    AdmissibilityRule,
    GameTrace,
    OpponentModel,
    estimate_mean,
    fixed_point_iterate,
    simulate_repeated_game,
)
from .risk import RiskParams, minimal_risk, risk_expectation
from .spectral import SupplyAmplitude, dft_supply, idft_demand, supply_density, to_supply
from .strategy import (
    GaussianComponent,
    GridSpec,
    SampledAmplitude,
    Strategy,
    amplitude_q,
    classical_mixture_density,
    density_q,
    moments,
    norm_squared,
    sample,
    standard_gaussian,
)
from .tactics import Tactic, apply, compose, from_z, shift_only
from .wigner import WignerField, negativity_volume, slice_at_p, wigner_field, wigner_point

__version__ = "0.1.0"
