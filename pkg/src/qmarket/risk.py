"""Expectation of the risk inclination operator

    H = (P - p0)**2 / (2 m) + m * omega**2 * (Q - q0)**2 / 2,   omega = 2 pi / theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import InvalidParameterError
from .spectral import supply_density, supply_moments, to_supply
from .strategy import Strategy, density_q, moments

__all__ = [
    "RiskParams",
    "risk_expectation",
    "risk_expectation_quadrature",
    "minimal_risk",
    "matched_width",
]


@dataclass(frozen=True)
class RiskParams:
    """``m``: buy/sell risk asymmetry; ``theta``: mean time between opposite moves.

    ``p0``/``q0`` default to the strategy's own means when left as ``None``.
    """

    m: float
    theta: float
    p0: float | None = None
    q0: float | None = None

    def __post_init__(self):
        for name in ("m", "theta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{name} must be a positive finite number, got {v!r}")
        for name in ("p0", "q0"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite, got {v!r}")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.theta

    @classmethod
    def from_omega(cls, m: float, omega: float, **kw) -> "RiskParams":
        if not omega > 0:
            raise InvalidParameterError(f"omega must be positive, got {omega}")
        return cls(m, 2.0 * math.pi / omega, **kw)


def _combine(rp: RiskParams, mean_p, var_p, mean_q, var_q) -> float:
    p0 = mean_p if rp.p0 is None else rp.p0
    q0 = mean_q if rp.q0 is None else rp.q0
    ep = var_p + (mean_p - p0) ** 2
    eq = var_q + (mean_q - q0) ** 2
    return ep / (2.0 * rp.m) + rp.m * rp.omega**2 * eq / 2.0


def risk_expectation(s: Strategy, rp: RiskParams) -> float:
    """``<H>`` from the closed-form demand and supply moments."""
    if not isinstance(rp, RiskParams):
        raise InvalidParameterError("rp must be a RiskParams instance")
    mq, sq = moments(s)
    mp, sp = supply_moments(to_supply(s))
    return _combine(rp, mp, sp * sp, mq, sq * sq)


def risk_expectation_quadrature(s: Strategy, rp: RiskParams) -> float:
    """Same quantity with every moment integrated numerically."""
    lo, hi = s.support(12.0)
    sa = to_supply(s)
    preach = max(12.0 * s.hbar_e / (2.0 * c.width) for c in s.components)

    def mom(fn, a, b):
        kw = dict(epsabs=1e-14, epsrel=1e-12, limit=400)
        m0 = integrate.quad(fn, a, b, **kw)[0]
        m1 = integrate.quad(lambda x: x * fn(x), a, b, **kw)[0] / m0
        m2 = integrate.quad(lambda x: (x - m1) ** 2 * fn(x), a, b, **kw)[0] / m0
        return m1, m2

    mq, vq = mom(lambda q: density_q(s, q), lo, hi)
    mp, vp = mom(lambda p: supply_density(sa, p), -preach, preach)
    return _combine(rp, mp, vp, mq, vq)


def minimal_risk(rp: RiskParams, hbar_e: float = 1.0) -> float:
    """Lower bound ``hbar * omega / 2`` of ``<H>`` over all strategies."""
    if not hbar_e > 0:
        raise InvalidParameterError(f"hbar_e must be positive, got {hbar_e}")
    return hbar_e * rp.omega / 2.0


def matched_width(rp: RiskParams, hbar_e: float = 1.0) -> float:
    """Width of the single Gaussian attaining :func:`minimal_risk`."""
    return (hbar_e / (2.0 * rp.m * rp.omega)) ** 0.5
