"""Demand and supply curves, Giffen (non-monotone) detection.

A demand curve accumulates the withdrawal-price density from the top of the
grid downwards, ``C(q) = int_q^hi density``: the probability that the player
still buys at log-price ``q``. For a true density it can only fall as ``q``
rises; a fixed-p Wigner slice can make it rise somewhere, which is the
Giffen anomaly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate

from .errors import DegenerateSliceError, InvalidParameterError
from .wigner import WignerField, slice_at_p

__all__ = [
    "Orientation",
    "Curve",
    "GiffenReport",
    "cumulative_from_top",
    "demand_curve",
    "supply_curve",
    "conditional_demand",
    "detect_giffen",
    "integrated_anomaly_check",
    "MONOTONE_TOL",
]

MONOTONE_TOL = 1e-10


class Orientation(enum.Enum):
    DEMAND_INVERTED_DOMAIN = "demand_inverted_domain"
    SUPPLY_DIRECT = "supply_direct"


@dataclass(frozen=True, eq=False)
class Curve:
    """Sampled cumulative curve.

    ``scale`` is the factor the source density was divided by before
    accumulation (1 for true densities, the slice integral for conditional
    demand). ``q0``/``sigma`` are the reference moments used for prices.
    """

    coords: np.ndarray
    cumulative: np.ndarray
    orientation: Orientation
    scale: float = 1.0
    q0: float | None = None
    sigma: float | None = None
    annotations: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.coords, dtype=float)
        c = np.asarray(self.cumulative, dtype=float)
        if x.ndim != 1 or x.shape != c.shape or len(x) < 2:
            raise InvalidParameterError("coords and cumulative must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(x) <= 0):
            raise InvalidParameterError("curve coordinates must be strictly increasing")
        object.__setattr__(self, "coords", x)
        object.__setattr__(self, "cumulative", c)

    def prices(self) -> np.ndarray:
        """``exp((q - q0) / sigma)`` for each coordinate (q0=0, sigma=1 if unset)."""
        q0 = 0.0 if self.q0 is None else self.q0
        sigma = 1.0 if self.sigma is None else self.sigma
        return np.exp((self.coords - q0) / sigma)


@dataclass(frozen=True)
class GiffenReport:
    monotone: bool
    violation_intervals: tuple[tuple[float, float], ...] = ()
    max_interest_q: float | None = None
    max_interest_price: float | None = None

    def to_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "violation_intervals": [list(iv) for iv in self.violation_intervals],
            "max_interest_q": self.max_interest_q,
            "max_interest_price": self.max_interest_price,
        }


def _uniform_step(x: np.ndarray) -> float:
    d = np.diff(x)
    step = (x[-1] - x[0]) / (len(x) - 1)
    if not np.allclose(d, step, rtol=1e-9, atol=0.0):
        raise InvalidParameterError("density must be sampled on a uniform grid")
    return step


def _antiderivative(x: np.ndarray, values: np.ndarray) -> np.ndarray:
    # Shape-preserving cubic: on each interval the interpolant stays between
    # its end samples, so nonnegative data can never give a decreasing integral.
    F = interpolate.PchipInterpolator(x, values).antiderivative()
    return F(x)


def cumulative_from_top(x, density) -> np.ndarray:
    """``int_x^hi density``, exactly zero at the top of the grid."""
    x = np.asarray(x, dtype=float)
    _uniform_step(x)
    F = _antiderivative(x, np.asarray(density, dtype=float))
    return F[-1] - F


def _integral(x, values) -> float:
    return float(cumulative_from_top(x, values)[0])


def demand_curve(q, density, *, q0: float | None = None, sigma: float | None = None) -> Curve:
    """Inverted-domain cumulative of a density sampled on a uniform q grid."""
    q = np.asarray(q, dtype=float)
    return Curve(q, cumulative_from_top(q, density), Orientation.DEMAND_INVERTED_DOMAIN, 1.0, q0, sigma)


def supply_curve(p, density) -> Curve:
    """Direct cumulative ``int_lo^p density`` over the supply variable."""
    p = np.asarray(p, dtype=float)
    _uniform_step(p)
    F = _antiderivative(p, np.asarray(density, dtype=float))
    return Curve(p, F - F[0], Orientation.SUPPLY_DIRECT)


def conditional_demand(
    f: WignerField, p: float, *, q0: float | None = None, sigma: float | None = None
) -> Curve:
    """Demand curve of the Wigner slice at ``p``, renormalized to unit total.

    The sign of the slice is kept, so the curve may be non-monotone.
    Raises :class:`DegenerateSliceError` if the slice integrates to zero.
    """
    sl = slice_at_p(f, p)
    total = _integral(sl.q, sl.values)
    mass = _integral(sl.q, np.abs(sl.values))
    if not abs(total) > 1e-12 * max(mass, 1e-300):
        raise DegenerateSliceError(f"Wigner slice at p = {p} integrates to zero")
    curve = Curve(
        sl.q,
        cumulative_from_top(sl.q, sl.values / total),
        Orientation.DEMAND_INVERTED_DOMAIN,
        total,
        q0,
        sigma,
        {"p": float(p)},
    )
    return curve


def _runs(mask: np.ndarray, x: np.ndarray) -> tuple[tuple[float, float], ...]:
    out = []
    i, n = 0, len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            out.append((float(x[i]), float(x[j + 1])))
            i = j + 1
        else:
            i += 1
    return tuple(out)


def detect_giffen(
    c: Curve, q0: float | None = None, sigma: float | None = None, tol: float = MONOTONE_TOL
) -> GiffenReport:
    """Check monotonicity and locate an interior maximum of the curve.

    A demand curve should never increase with q; a supply curve should never
    decrease with p. Violation intervals are the maximal runs of grid steps
    going the wrong way by more than ``tol``. For demand curves, a global
    maximum strictly inside the grid is reported as the maximum-interest
    point with price ``exp((q_max - q0) / sigma)``.
    """
    d = np.diff(c.cumulative)
    if c.orientation is Orientation.DEMAND_INVERTED_DOMAIN:
        bad = d > tol
    else:
        bad = d < -tol
    intervals = _runs(bad, c.coords)
    q0 = c.q0 if q0 is None else q0
    sigma = c.sigma if sigma is None else sigma
    q_max = price = None
    if c.orientation is Orientation.DEMAND_INVERTED_DOMAIN:
        i = int(np.argmax(c.cumulative))
        if 0 < i < len(c.coords) - 1 and c.cumulative[i] > c.cumulative[0] + tol:
            q_max = _refine_peak(c.coords, c.cumulative, i)
            price = math.exp((q_max - (q0 or 0.0)) / (1.0 if sigma is None else sigma))
    return GiffenReport(not intervals, intervals, q_max, price)


def _refine_peak(x, y, i) -> float:
    # Vertex of the parabola through the three samples around the discrete peak.
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(x[i])
    h = x[i + 1] - x[i]
    return float(x[i] + 0.5 * h * (y0 - y2) / denom)


def integrated_anomaly_check(f: WignerField, tol: float = MONOTONE_TOL) -> bool:
    """True when the p-integrated field gives a monotone demand curve."""
    marginal = f.marginal_q()
    curve = demand_curve(f.qgrid.points, marginal)
    return detect_giffen(curve, tol=tol).monotone
