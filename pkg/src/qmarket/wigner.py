"""Wigner quasi-probability of a strategy on the (p, q) phase plane.

Primary path: each component pair contributes a Gaussian in (p, q) times a
phase, evaluated in closed form either from the demand amplitude::

    W(p, q) = 1/(2 pi hbar) int exp(+i p x / hbar) psi(q + x/2) psi*(q - x/2) dx / <psi|psi>

or, equivalently, from the normalized supply amplitude::

    W(p, q) = 1/(2 pi hbar) int exp(-i q y / hbar) phi(p + y/2) phi*(p - y/2) dy / <psi|psi>

``wigner_point_quadrature`` integrates the first form numerically and serves
as the oracle for both.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError, OutOfDomainError, TruncationWarning
from .spectral import to_supply
from .strategy import COVERAGE_WIDTHS, GridSpec, Strategy, amplitude_q, check_coverage, norm_squared

__all__ = [
    "WignerField",
    "Slice",
    "wigner_point",
    "wigner_point_quadrature",
    "wigner_values",
    "wigner_field",
    "negativity_volume",
    "slice_at_p",
    "REALITY_TOL",
]

REALITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class WignerField:
    """``values[i, j] = W(pgrid[i], qgrid[j])``; p in units hbar/sigma, q in sigma."""

    pgrid: GridSpec
    qgrid: GridSpec
    values: np.ndarray
    hbar_e: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.pgrid.n, self.qgrid.n):
            raise InvalidParameterError(
                f"field shape {vals.shape} does not match grids ({self.pgrid.n}, {self.qgrid.n})"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("Wigner values must be finite")
        object.__setattr__(self, "values", vals)

    def marginal_q(self) -> np.ndarray:
        """Integrate over p: the demand density on ``qgrid``."""
        return integrate.trapezoid(self.values, dx=self.pgrid.spacing, axis=0)

    def marginal_p(self) -> np.ndarray:
        """Integrate over q: the supply density on ``pgrid``."""
        return integrate.trapezoid(self.values, dx=self.qgrid.spacing, axis=1)

    def total(self) -> float:
        return float(integrate.trapezoid(self.marginal_q(), dx=self.qgrid.spacing))


@dataclass(frozen=True, eq=False)
class Slice:
    """W(p, q) at fixed ``p`` sampled on ``q``; may be negative."""

    p: float
    q: np.ndarray
    values: np.ndarray

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.q[0], self.q[-1], len(self.q))


def _demand_terms(s: Strategy, P, Q):
    h = s.hbar_e
    out = np.zeros(np.broadcast(P, Q).shape, dtype=complex)
    comps = s.components
    for cj in comps:
        uj = Q - cj.shift
        for ck in comps:
            uk = Q - ck.shift
            A = (cj.alpha + ck.alpha) / 4.0
            B = -cj.alpha * uj + ck.alpha * uk + 1j * P / h
            expo = B * B / (4.0 * A) - cj.alpha * uj**2 - ck.alpha * uk**2
            out += cj.prefactor * np.conj(ck.prefactor) * math.sqrt(math.pi / A) * np.exp(expo)
    return out / (2.0 * math.pi * h * norm_squared(s))


def _supply_terms(s: Strategy, P, Q):
    h = s.hbar_e
    terms = to_supply(s).terms
    out = np.zeros(np.broadcast(P, Q).shape, dtype=complex)
    for tj in terms:
        vj = P - tj.center
        for tk in terms:
            vk = P - tk.center
            A = (tj.beta + tk.beta) / 4.0
            B = (
                -tj.beta * vj
                + tk.beta * vk
                + 0.5j * (tj.phase_slope + tk.phase_slope)
                - 1j * Q / h
            )
            expo = (
                B * B / (4.0 * A)
                - tj.beta * vj**2
                - tk.beta * vk**2
                + 1j * (tj.phase_slope - tk.phase_slope) * P
            )
            out += tj.prefactor * np.conj(tk.prefactor) * math.sqrt(math.pi / A) * np.exp(expo)
    return out / (2.0 * math.pi * h * norm_squared(s))


_METHODS = {"demand": _demand_terms, "supply": _supply_terms}


def wigner_values(s: Strategy, p, q, method: str = "demand", return_residue: bool = False):
    """Closed-form W on broadcast arrays ``p``, ``q``.

    ``method`` selects the demand-side or supply-side formula. The imaginary
    residue is checked against ``REALITY_TOL`` and discarded.
    """
    try:
        fn = _METHODS[method]
    except KeyError:
        raise InvalidParameterError(f"unknown Wigner method {method!r}") from None
    P, Q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    raw = fn(s, P, Q)
    residue = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if residue > REALITY_TOL:
        raise ArithmeticError(f"Wigner function has imaginary residue {residue:.3g}")
    if return_residue:
        return raw.real, residue
    return raw.real


def wigner_point(s: Strategy, p: float, q: float, method: str = "demand") -> float:
    return float(wigner_values(s, p, q, method))


def wigner_point_quadrature(s: Strategy, p: float, q: float) -> float:
    """Direct adaptive quadrature of the demand-side integral (oracle)."""
    h = s.hbar_e
    reach = max(abs(q - c.shift) + 12.0 * c.width for c in s.components)
    L = 2.0 * reach

    def integrand(x):
        return np.exp(1j * p * x / h) * amplitude_q(s, q + x / 2) * np.conj(amplitude_q(s, q - x / 2))

    kw = dict(epsabs=1e-13, epsrel=1e-11, limit=400)
    re = sum(integrate.quad(lambda x: integrand(x).real, a, b, **kw)[0] for a, b in ((-L, 0.0), (0.0, L)))
    im = sum(integrate.quad(lambda x: integrand(x).imag, a, b, **kw)[0] for a, b in ((-L, 0.0), (0.0, L)))
    if abs(im) > 1e-9:
        raise ArithmeticError(f"quadrature Wigner value has imaginary part {im:.3g}")
    return re / (2.0 * math.pi * h * norm_squared(s))


def _check_p_coverage(s: Strategy, pgrid: GridSpec) -> None:
    reach = max(COVERAGE_WIDTHS * s.hbar_e / (2.0 * c.width) for c in s.components)
    if pgrid.lo > -reach or pgrid.hi < reach:
        warnings.warn(
            f"p grid [{pgrid.lo:g}, {pgrid.hi:g}] does not cover the supply support "
            f"[{-reach:g}, {reach:g}]",
            TruncationWarning,
            stacklevel=3,
        )


def wigner_field(s: Strategy, pgrid: GridSpec, qgrid: GridSpec, method: str = "demand") -> WignerField:
    """Tabulate W over ``pgrid x qgrid``."""
    check_coverage(s, qgrid, "q grid")
    _check_p_coverage(s, pgrid)
    P = pgrid.points[:, None]
    Q = qgrid.points[None, :]
    return WignerField(pgrid, qgrid, wigner_values(s, P, Q, method), s.hbar_e)


def negativity_volume(f: WignerField) -> float:
    """Phase-space volume under the negative part of W (trapezoid rule)."""
    neg = np.maximum(0.0, -f.values)
    inner = integrate.trapezoid(neg, dx=f.qgrid.spacing, axis=1)
    return float(integrate.trapezoid(inner, dx=f.pgrid.spacing))


def slice_at_p(f: WignerField, p: float) -> Slice:
    """Row of the field at ``p``, linearly interpolated between neighbouring rows."""
    g = f.pgrid
    if not g.contains(p):
        raise OutOfDomainError(f"p = {p} outside the field's p range [{g.lo}, {g.hi}]")
    pos = (p - g.lo) / g.spacing
    i = min(int(math.floor(pos)), g.n - 2)
    t = pos - i
    if abs(t) < 1e-9:
        row = f.values[i].copy()
    elif abs(t - 1.0) < 1e-9:
        row = f.values[i + 1].copy()
    else:
        row = (1.0 - t) * f.values[i] + t * f.values[i + 1]
    return Slice(float(p), f.qgrid.points, row)
