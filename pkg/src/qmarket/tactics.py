"""The tactic family ``xi0 * I + xi1 * D_delta`` acting on strategies.

``D_delta`` shifts the demand amplitude by ``delta`` in log-price. The pair
``(xi0, xi1)`` is a point of the Riemann sphere in homogeneous coordinates,
so tactics differing by a common nonzero factor produce the same normalized
strategy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidParameterError, ZeroAmplitudeError
from .strategy import GaussianComponent, Strategy

__all__ = ["Tactic", "from_z", "apply", "compose", "shift_only", "approach_pole", "IDENTITY"]

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class Tactic:
    delta: float
    xi0: complex
    xi1: complex

    def __post_init__(self):
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "xi0", complex(self.xi0))
        object.__setattr__(self, "xi1", complex(self.xi1))
        for v in (self.xi0, self.xi1):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidParameterError(f"homogeneous coordinates must be finite, got {v}")
        if not math.isfinite(self.delta):
            raise InvalidParameterError(f"delta must be finite, got {self.delta}")
        if self.xi0 == 0 and self.xi1 == 0:
            raise InvalidParameterError("(xi0, xi1) = (0, 0) is not a point of the sphere")

    @property
    def z(self) -> complex:
        """Inhomogeneous coordinate ``xi1 / xi0``; ``inf`` at the shift pole."""
        if self.xi0 == 0:
            return complex(math.inf, 0.0)
        return self.xi1 / self.xi0

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "xi0": [self.xi0.real, self.xi0.imag],
            "xi1": [self.xi1.real, self.xi1.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Tactic":
        return cls(data["delta"], complex(*data["xi0"]), complex(*data["xi1"]))


IDENTITY = Tactic(0.0, 1.0, 1.0)


def from_z(delta: float, z) -> Tactic:
    """Tactic with ``xi1 / xi0 = z``; ``z = inf`` gives the pure shift ``(0, 1)``."""
    zc = complex(z)
    if cmath.isinf(zc):
        return Tactic(delta, 0.0, 1.0)
    if cmath.isnan(zc):
        raise InvalidParameterError("z must not be NaN")
    return Tactic(delta, 1.0, zc)


def _merge(parts):
    merged: list[list] = []
    for w, shift, width in parts:
        for m in merged:
            if abs(m[1] - shift) <= MERGE_TOL and m[2] == width:
                m[0] += w
                break
        else:
            merged.append([w, shift, width])
    return [GaussianComponent(w, shift, width) for w, shift, width in merged if w != 0]


def apply(t: Tactic, s: Strategy) -> Strategy:
    """Superpose ``xi0 * psi(q)`` with ``xi1 * psi(q - delta)``.

    Components landing on the same (shift, width) are merged by adding weights.
    Raises :class:`ZeroAmplitudeError` if the result cancels completely.
    """
    parts = [(t.xi0 * c.weight, c.shift, c.width) for c in s.components]
    parts += [(t.xi1 * c.weight, c.shift + t.delta, c.width) for c in s.components]
    comps = _merge(parts)
    if not comps:
        raise ZeroAmplitudeError(f"tactic {t} annihilates the strategy")
    return Strategy(tuple(comps), hbar_e=s.hbar_e)


def compose(a: Tactic, b: Tactic) -> Tactic:
    """Commutative composition: shifts add, homogeneous coordinates multiply."""
    return Tactic(a.delta + b.delta, a.xi0 * b.xi0, a.xi1 * b.xi1)


def shift_only(delta: float, s: Strategy) -> Strategy:
    comps = tuple(GaussianComponent(c.weight, c.shift + delta, c.width) for c in s.components)
    return Strategy(comps, hbar_e=s.hbar_e)


def approach_pole(delta: float, pole: str, n: int, ratio: float = 0.5) -> Iterator[Tactic]:
    """Yield ``n`` tactics whose ``z`` tends to the pole ``"identity"`` (z -> 0)
    or ``"shift"`` (z -> inf) geometrically.

    Useful for replacing the non-unitary pole tactics by convergent families.
    """
    if not 0 < ratio < 1:
        raise InvalidParameterError("ratio must lie in (0, 1)")
    if pole not in ("identity", "shift"):
        raise InvalidParameterError(f"unknown pole {pole!r}")
    for k in range(1, n + 1):
        z = ratio**k if pole == "identity" else ratio**-k
        yield from_z(delta, z)
