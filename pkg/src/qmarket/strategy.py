"""Trader strategies as superpositions of Gaussian amplitudes over log-price."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._gauss import gauss_moment, gauss_upper_tail
from .errors import (
    InvalidParameterError,
    ResolutionWarning,
    TruncationWarning,
    ZeroAmplitudeError,
)

__all__ = [
    "GaussianComponent",
    "Strategy",
    "GridSpec",
    "Representation",
    "SampledAmplitude",
    "standard_gaussian",
    "amplitude_q",
    "norm_squared",
    "density_q",
    "classical_mixture_density",
    "moments",
    "upper_tail",
    "sample",
    "norm_squared_quadrature",
    "moments_quadrature",
]

_NORM_FLOOR = 1e-24
# Number of component widths a grid must extend past the outermost shift.
COVERAGE_WIDTHS = 6.0


@dataclass(frozen=True)
class GaussianComponent:
    """One term ``weight * g(q - shift)`` where ``|g|**2`` is N(0, width**2)."""

    weight: complex
    shift: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weight", complex(self.weight))
        object.__setattr__(self, "shift", float(self.shift))
        object.__setattr__(self, "width", float(self.width))
        if not (math.isfinite(self.weight.real) and math.isfinite(self.weight.imag)):
            raise InvalidParameterError(f"component weight must be finite, got {self.weight}")
        if not math.isfinite(self.shift):
            raise InvalidParameterError(f"component shift must be finite, got {self.shift}")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise InvalidParameterError(f"component width must be positive, got {self.width}")

    @property
    def alpha(self) -> float:
        return 1.0 / (4.0 * self.width**2)

    @property
    def prefactor(self) -> complex:
        # (2 pi)^(-1/4) width^(-1/2) makes a weight-1 component unit-norm.
        return self.weight * (2.0 * math.pi) ** -0.25 / math.sqrt(self.width)


@dataclass(frozen=True)
class Strategy:
    """A pure strategy in the demand representation.

    The analytic component list is authoritative; grids are only ever derived
    from it. Construction fails with :class:`ZeroAmplitudeError` when the
    components cancel completely.
    """

    components: tuple[GaussianComponent, ...]
    hbar_e: float = 1.0
    _norm: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvalidParameterError("a strategy needs at least one component")
        if not all(isinstance(c, GaussianComponent) for c in comps):
            raise InvalidParameterError("components must be GaussianComponent instances")
        object.__setattr__(self, "components", comps)
        if not (self.hbar_e > 0 and math.isfinite(self.hbar_e)):
            raise InvalidParameterError(f"hbar_e must be positive, got {self.hbar_e}")
        object.__setattr__(self, "hbar_e", float(self.hbar_e))
        norm = _pair_sum(comps, order=0)
        scale = sum(abs(c.weight) ** 2 for c in comps)
        if not norm > _NORM_FLOOR * max(scale, 1.0):
            raise ZeroAmplitudeError(
                f"strategy amplitude vanishes identically (norm^2 = {norm:.3g})"
            )
        object.__setattr__(self, "_norm", norm)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def shifts(self) -> np.ndarray:
        return np.array([c.shift for c in self.components])

    @property
    def widths(self) -> np.ndarray:
        return np.array([c.width for c in self.components])

    def support(self, nwidths: float = COVERAGE_WIDTHS) -> tuple[float, float]:
        """Interval extending ``nwidths`` widths past the outermost components."""
        lo = min(c.shift - nwidths * c.width for c in self.components)
        hi = max(c.shift + nwidths * c.width for c in self.components)
        return lo, hi


def _pair_coefficients(comps):
    """Gaussian exponents of every product conj(g_j) * g_k, as (A, B, C, coef) arrays."""
    alpha = np.array([c.alpha for c in comps])
    shift = np.array([c.shift for c in comps])
    pre = np.array([c.prefactor for c in comps])
    aj, ak = alpha[:, None], alpha[None, :]
    sj, sk = shift[:, None], shift[None, :]
    A = aj + ak
    B = 2.0 * (aj * sj + ak * sk)
    C = -(aj * sj**2 + ak * sk**2)
    coef = np.conj(pre)[:, None] * pre[None, :]
    return A, B, C, coef


def _pair_sum(comps, order):
    A, B, C, coef = _pair_coefficients(comps)
    return float(np.real(np.sum(coef * gauss_moment(order, A, B, C))))


def standard_gaussian(hbar_e: float = 1.0) -> Strategy:
    """Square root of the standard normal density: mean 0, standard deviation 1."""
    if not hbar_e > 0:
        raise InvalidParameterError(f"hbar_e must be positive, got {hbar_e}")
    return Strategy((GaussianComponent(1.0, 0.0, 1.0),), hbar_e=hbar_e)


def amplitude_q(s: Strategy, q):
    """Unnormalized superposition amplitude at log-price ``q`` (scalar or array)."""
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape, dtype=complex)
    for c in s.components:
        out += c.prefactor * np.exp(-c.alpha * (q - c.shift) ** 2)
    return out if out.ndim else complex(out)


def norm_squared(s: Strategy) -> float:
    """``<psi|psi>`` from the closed-form pairwise overlaps.

    For components of widths s_j, s_k and shift difference d the overlap is
    ``sqrt(2 s_j s_k / (s_j**2 + s_k**2)) * exp(-d**2 / (4 (s_j**2 + s_k**2)))``
    times ``conj(w_j) w_k``.
    """
    return s._norm


def density_q(s: Strategy, q):
    """Normalized demand density ``|<q|psi>|**2 / <psi|psi>``."""
    amp = np.asarray(amplitude_q(s, q))
    out = (amp.real**2 + amp.imag**2) / s._norm
    return out if out.ndim else float(out)


def classical_mixture_density(z: complex, delta: float, q):
    """Interference-free mixture of N(0, 1) and N(delta, 1) with weights 1 : |z|**2.

    ``z`` may be ``math.inf`` (all mass on the shifted bell).
    """
    q = np.asarray(q, dtype=float)
    g0 = np.exp(-(q**2) / 2.0)
    g1 = np.exp(-((q - delta) ** 2) / 2.0)
    if _is_infinite(z):
        out = g1
    else:
        r2 = abs(complex(z)) ** 2
        if not math.isfinite(r2):
            raise InvalidParameterError(f"z must be finite or infinite, got {z}")
        out = (g0 + r2 * g1) / (1.0 + r2)
    out = out / math.sqrt(2.0 * math.pi)
    return out if out.ndim else float(out)


def _is_infinite(z) -> bool:
    try:
        zc = complex(z)
    except (TypeError, ValueError):
        return False
    return math.isinf(zc.real) or math.isinf(zc.imag)


def moments(s: Strategy) -> tuple[float, float]:
    """Mean and standard deviation of :func:`density_q`, in closed form."""
    mean = _pair_sum(s.components, 1) / s._norm
    second = _pair_sum(s.components, 2) / s._norm
    return mean, math.sqrt(max(second - mean * mean, 0.0))


def upper_tail(s: Strategy, q):
    """``int_q^inf density_q`` in closed form (erfc per component pair)."""
    A, B, C, coef = _pair_coefficients(s.components)
    q = np.asarray(q, dtype=float)
    tails = gauss_upper_tail(q[..., None, None], A, B, C)
    out = np.real(np.sum(coef * tails, axis=(-2, -1))) / s._norm
    return out if out.ndim else float(out)


def norm_squared_quadrature(s: Strategy) -> float:
    """Adaptive-quadrature oracle for :func:`norm_squared`."""
    lo, hi = s.support(12.0)
    f = lambda q: abs(amplitude_q(s, q)) ** 2
    return _quad_split(f, lo, hi, s)


def moments_quadrature(s: Strategy) -> tuple[float, float]:
    lo, hi = s.support(12.0)
    nrm = _quad_split(lambda q: abs(amplitude_q(s, q)) ** 2, lo, hi, s)
    m1 = _quad_split(lambda q: q * abs(amplitude_q(s, q)) ** 2, lo, hi, s) / nrm
    m2 = _quad_split(lambda q: (q - m1) ** 2 * abs(amplitude_q(s, q)) ** 2, lo, hi, s) / nrm
    return m1, math.sqrt(m2)


def _quad_split(f, lo, hi, s):
    # Break at each component centre so quad never straddles an unseen bump.
    pts = sorted({lo, hi, *(c.shift for c in s.components)})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            total += integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return total


class Representation(enum.Enum):
    DEMAND = "demand"
    SUPPLY = "supply"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``n`` points on ``[lo, hi]`` (both ends included)."""

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidParameterError(f"grid point count must be an integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if self.n < 2:
            raise InvalidParameterError(f"grid needs at least 2 points, got {self.n}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise InvalidParameterError(f"grid bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"lo:hi:n"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(f"grid must look like lo:hi:n, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise InvalidParameterError(f"bad grid {text!r}: {exc}") from None


@dataclass(frozen=True, eq=False)
class SampledAmplitude:
    """Amplitude values on a uniform grid; a derived view, never authoritative.

    ``conjugate_lo`` records the lower bound of the grid in the other
    representation so a discrete transform can be undone exactly.
    """

    grid: GridSpec
    values: np.ndarray
    representation: Representation
    hbar_e: float = 1.0
    conjugate_lo: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise InvalidParameterError(
                f"expected {self.grid.n} samples, got array of shape {vals.shape}"
            )
        object.__setattr__(self, "values", vals)

    def norm_squared(self) -> float:
        """Trapezoid estimate of ``int |values|**2``."""
        return float(integrate.trapezoid(np.abs(self.values) ** 2, dx=self.grid.spacing))


def check_coverage(s: Strategy, grid: GridSpec, what: str = "grid") -> None:
    """Warn when ``grid`` misses part of the strategy's support or is too coarse."""
    lo, hi = s.support()
    if grid.lo > lo or grid.hi < hi:
        warnings.warn(
            f"{what} [{grid.lo:g}, {grid.hi:g}] does not cover the strategy support "
            f"[{lo:g}, {hi:g}] ({COVERAGE_WIDTHS:g} widths past the extreme shifts)",
            TruncationWarning,
            stacklevel=3,
        )
    if grid.spacing > 0.5 * min(c.width for c in s.components):
        warnings.warn(
            f"{what} spacing {grid.spacing:g} under-resolves component width "
            f"{min(c.width for c in s.components):g}",
            ResolutionWarning,
            stacklevel=3,
        )


def sample(s: Strategy, grid: GridSpec) -> SampledAmplitude:
    """Evaluate the normalized demand amplitude on ``grid``."""
    check_coverage(s, grid)
    values = np.asarray(amplitude_q(s, grid.points)) / math.sqrt(s._norm)
    return SampledAmplitude(grid, values, Representation.DEMAND, s.hbar_e)
