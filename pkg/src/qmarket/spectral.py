"""Demand <-> supply transforms.

The supply amplitude is ``<p|psi> = (2 pi hbar)^(-1/2) int exp(+i p q / hbar) <q|psi> dq``.
With this kernel a demand shift by ``delta`` multiplies the supply amplitude by
``exp(+i delta p / hbar)``, and the Wigner function's p-marginal is the supply
density. Each Gaussian demand component maps to a centred Gaussian in ``p``
with a linear phase, so the analytic transform is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._gauss import gauss_moment
from .errors import InvalidParameterError, InvalidRepresentationError, ZeroAmplitudeError
from .strategy import GridSpec, Representation, SampledAmplitude, Strategy
from .tactics import Tactic

__all__ = [
    "SupplyTerm",
    "SupplyAmplitude",
    "to_supply",
    "supply_amplitude",
    "supply_density",
    "supply_moments",
    "supply_norm_squared",
    "apply_supply_tactic",
    "dft_supply",
    "idft_demand",
    "supply_density_quadrature",
]


@dataclass(frozen=True)
class SupplyTerm:
    """``weight * (2pi)^(-1/4) width^(-1/2) exp(-(p-center)^2 / (4 width^2)) exp(i phase_slope p)``."""

    weight: complex
    center: float
    width: float
    phase_slope: float

    @property
    def beta(self) -> float:
        return 1.0 / (4.0 * self.width**2)

    @property
    def prefactor(self) -> complex:
        return complex(self.weight) * (2.0 * math.pi) ** -0.25 / math.sqrt(self.width)


@dataclass(frozen=True, eq=False)
class SupplyAmplitude:
    """Supply-side amplitude, either analytic (``terms``) or sampled."""

    terms: tuple[SupplyTerm, ...] | None = None
    sampled: SampledAmplitude | None = None
    hbar_e: float = 1.0
    _norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if (self.terms is None) == (self.sampled is None):
            raise InvalidParameterError("give exactly one of terms or sampled")
        if self.sampled is not None:
            if self.sampled.representation is not Representation.SUPPLY:
                raise InvalidRepresentationError("sampled supply amplitude must be in the supply representation")
            norm = self.sampled.norm_squared()
        else:
            object.__setattr__(self, "terms", tuple(self.terms))
            norm = _term_pair_sum(self.terms, 0)
        if not norm > 0:
            raise ZeroAmplitudeError("supply amplitude vanishes identically")
        object.__setattr__(self, "_norm", norm)

    @property
    def is_analytic(self) -> bool:
        return self.terms is not None


def _term_pair_sum(terms, order):
    beta = np.array([t.beta for t in terms])
    center = np.array([t.center for t in terms])
    slope = np.array([t.phase_slope for t in terms])
    pre = np.array([t.prefactor for t in terms])
    bj, bk = beta[:, None], beta[None, :]
    mj, mk = center[:, None], center[None, :]
    A = bj + bk
    B = 2.0 * (bj * mj + bk * mk) + 1j * (slope[None, :] - slope[:, None])
    C = -(bj * mj**2 + bk * mk**2)
    coef = np.conj(pre)[:, None] * pre[None, :]
    return float(np.real(np.sum(coef * gauss_moment(order, A, B, C))))


def to_supply(s: Strategy) -> SupplyAmplitude:
    """Closed-form unitary transform of every demand component.

    A component of width ``w`` at shift ``a`` becomes a centred term of width
    ``hbar / (2 w)`` carrying the phase ``exp(i a p / hbar)``.
    """
    h = s.hbar_e
    terms = tuple(
        SupplyTerm(c.weight, 0.0, h / (2.0 * c.width), c.shift / h) for c in s.components
    )
    return SupplyAmplitude(terms=terms, hbar_e=h)


def supply_amplitude(sa: SupplyAmplitude, p):
    """Unnormalized supply amplitude at ``p``."""
    p = np.asarray(p, dtype=float)
    if not sa.is_analytic:
        g = sa.sampled.grid
        vals = sa.sampled.values
        out = np.interp(p, g.points, vals.real, left=0.0, right=0.0) + 1j * np.interp(
            p, g.points, vals.imag, left=0.0, right=0.0
        )
        return out if out.ndim else complex(out)
    out = np.zeros(p.shape, dtype=complex)
    for t in sa.terms:
        out += t.prefactor * np.exp(-t.beta * (p - t.center) ** 2 + 1j * t.phase_slope * p)
    return out if out.ndim else complex(out)


def supply_density(sa: SupplyAmplitude, p):
    """Normalized supply density ``|<p|psi>|**2``."""
    amp = np.asarray(supply_amplitude(sa, p))
    out = (amp.real**2 + amp.imag**2) / sa._norm
    return out if out.ndim else float(out)


def supply_norm_squared(sa: SupplyAmplitude) -> float:
    return sa._norm


def supply_moments(sa: SupplyAmplitude) -> tuple[float, float]:
    """Mean and standard deviation of the supply density."""
    if sa.is_analytic:
        m1 = _term_pair_sum(sa.terms, 1) / sa._norm
        m2 = _term_pair_sum(sa.terms, 2) / sa._norm
    else:
        p = sa.sampled.grid.points
        d = np.abs(sa.sampled.values) ** 2 / sa._norm
        m1 = float(integrate.trapezoid(p * d, p))
        m2 = float(integrate.trapezoid(p * p * d, p))
    return m1, math.sqrt(max(m2 - m1 * m1, 0.0))


def apply_supply_tactic(t: Tactic, sa: SupplyAmplitude) -> SupplyAmplitude:
    """Superpose in the supply representation: ``xi0 phi(p) + xi1 phi(p - delta)``.

    Contrast with transforming :func:`qmarket.tactics.apply` output: the two
    orders generally give different densities.
    """
    if not sa.is_analytic:
        raise InvalidRepresentationError("supply-side tactics need an analytic amplitude")
    terms = [SupplyTerm(t.xi0 * u.weight, u.center, u.width, u.phase_slope) for u in sa.terms]
    # Translating exp(i k p) by delta leaves a constant phase exp(-i k delta).
    terms += [
        SupplyTerm(
            t.xi1 * u.weight * np.exp(-1j * u.phase_slope * t.delta),
            u.center + t.delta,
            u.width,
            u.phase_slope,
        )
        for u in sa.terms
    ]
    terms = [u for u in terms if u.weight != 0]
    return SupplyAmplitude(terms=tuple(terms), hbar_e=sa.hbar_e)


def supply_density_quadrature(s: Strategy, p: float) -> float:
    """Oracle: integrate the transform kernel numerically at one ``p``."""
    from .strategy import amplitude_q, norm_squared

    h = s.hbar_e
    lo, hi = s.support(12.0)

    w = p / h
    kw = dict(epsabs=1e-12, epsrel=1e-10, limit=400, wvar=w)
    a = lambda q: amplitude_q(s, q).real
    b = lambda q: amplitude_q(s, q).imag
    # exp(i w q) (a + i b): oscillatory weights keep quad accurate at large |p|.
    re = integrate.quad(a, lo, hi, weight="cos", **kw)[0] - integrate.quad(b, lo, hi, weight="sin", **kw)[0]
    im = integrate.quad(a, lo, hi, weight="sin", **kw)[0] + integrate.quad(b, lo, hi, weight="cos", **kw)[0]
    return (re * re + im * im) / (2.0 * math.pi * h) / norm_squared(s)


def _phase_index(n: int) -> np.ndarray:
    return np.exp(-2j * math.pi * (n // 2) * np.arange(n) / n)


def dft_supply(sa: SampledAmplitude) -> SampledAmplitude:
    """Discrete counterpart of :func:`to_supply` for sampled demand amplitudes.

    The output grid is centred with spacing ``2 pi hbar / (n dq)``. Values are
    scaled so that ``sum |values|**2 dp == sum |input|**2 dq`` exactly.
    """
    if sa.representation is not Representation.DEMAND:
        raise InvalidRepresentationError("dft_supply expects a demand-representation sample")
    g, h = sa.grid, sa.hbar_e
    n, dq = g.n, g.spacing
    dp = 2.0 * math.pi * h / (n * dq)
    p = (np.arange(n) - n // 2) * dp
    y = np.fft.ifft(sa.values * _phase_index(n), norm="ortho")
    vals = math.sqrt(dq / dp) * np.exp(1j * p * g.lo / h) * y
    pgrid = GridSpec(p[0], p[-1], n)
    return SampledAmplitude(pgrid, vals, Representation.SUPPLY, h, conjugate_lo=g.lo)


def idft_demand(sa: SampledAmplitude) -> SampledAmplitude:
    """Inverse of :func:`dft_supply`."""
    if sa.representation is not Representation.SUPPLY:
        raise InvalidRepresentationError("idft_demand expects a supply-representation sample")
    if sa.conjugate_lo is None:
        raise InvalidRepresentationError("supply sample does not record its demand grid origin")
    g, h = sa.grid, sa.hbar_e
    n, dp = g.n, g.spacing
    dq = 2.0 * math.pi * h / (n * dp)
    p = (np.arange(n) - n // 2) * dp
    y = sa.values * np.exp(-1j * p * sa.conjugate_lo / h) / math.sqrt(dq / dp)
    vals = np.fft.fft(y, norm="ortho") / _phase_index(n)
    qgrid = GridSpec(sa.conjugate_lo, sa.conjugate_lo + (n - 1) * dq, n)
    return SampledAmplitude(qgrid, vals, Representation.DEMAND, h, conjugate_lo=g.lo)
