"""Repeated passive-opponent games under the self-consistent tactic ``D_E(q)``.

Each round the player trades against quotes drawn from the opponent's
density at withdrawal log-price ``x``, measures a mean, and moves ``x`` to it.

Which quotes are accepted, and which mean is measured, is set by an
:class:`AdmissibilityRule`. The default (``side="sell"``,
``renormalize=False``) accepts quotes at or above ``x`` and measures the
average gain per game, with a round without a deal counting as zero. Its
update map ``x -> E[q 1{q >= x}]`` has slope ``-x f(x)``. That slope has
modulus below one for any positive density with ``max q f(q) < 1``, so the
map is a contraction with a unique fixed point. The conditional mean
``E[q | q >= x]`` (``renormalize=True``) always lies beyond ``x`` for
densities with unbounded support, so it drifts without converging. It is
kept for comparison.

For a sign-indefinite opponent (a Wigner slice with negative parts) the
fixed-point argument has no positive measure to stand on. The game then
stops with ``converged=False`` and a ``reason`` instead of raising.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .curves import cumulative_from_top
from .errors import InvalidParameterError, SignIndefiniteError
from .wigner import Slice

__all__ = [
    "OpponentKind",
    "OpponentModel",
    "AdmissibilityRule",
    "GameRound",
    "GameTrace",
    "estimate_mean",
    "update_map",
    "fixed_point_iterate",
    "simulate_repeated_game",
]

_NEG_TOL = 1e-12


class OpponentKind(enum.Enum):
    GAUSSIAN = "gaussian"
    WIGNER_SLICE = "wigner_slice"


@dataclass(frozen=True, eq=False)
class OpponentModel:
    """Passive opponent quoting log-prices from a fixed density.

    Build with :meth:`gaussian` (``sigma=0`` is a point mass) or
    :meth:`from_slice` (sampled, unit total, pointwise sign unrestricted).
    """

    kind: OpponentKind
    mu: float | None = None
    sigma: float | None = None
    q: np.ndarray | None = None
    density: np.ndarray | None = None

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> "OpponentModel":
        if not (math.isfinite(mu) and math.isfinite(sigma) and sigma >= 0):
            raise InvalidParameterError(f"need finite mu and sigma >= 0, got ({mu}, {sigma})")
        return cls(OpponentKind.GAUSSIAN, float(mu), float(sigma))

    @classmethod
    def from_slice(cls, q, values=None) -> "OpponentModel":
        """Opponent whose quote 'density' is a Wigner slice, rescaled to unit total."""
        if isinstance(q, Slice):
            q, values = q.q, q.values
        q = np.asarray(q, dtype=float)
        values = np.asarray(values, dtype=float)
        if q.shape != values.shape or q.ndim != 1 or len(q) < 3:
            raise InvalidParameterError("slice needs matching 1-D q and value arrays")
        total = float(cumulative_from_top(q, values)[0])
        if not total > 0:
            raise InvalidParameterError(f"slice integrates to {total:.3g}; cannot normalize")
        return cls(OpponentKind.WIGNER_SLICE, q=q, density=values / total)

    @property
    def is_positive(self) -> bool:
        if self.kind is OpponentKind.GAUSSIAN:
            return True
        return bool(np.min(self.density) >= -_NEG_TOL * np.max(np.abs(self.density)))

    def mass_and_gain(self, x: float, side: str) -> tuple[float, float]:
        """``(int_acc f, int_acc q f)`` over the quotes accepted at ``x``."""
        if self.kind is OpponentKind.GAUSSIAN:
            mu, sigma = self.mu, self.sigma
            if sigma == 0:
                hit = (mu >= x) if side == "sell" else (mu <= x)
                return float(hit), mu * float(hit)
            a = (x - mu) / sigma
            upper = 0.5 * erfc(a / math.sqrt(2.0))
            pdf = math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)
            if side == "sell":
                return upper, mu * upper + sigma * pdf
            lower = 1.0 - upper
            return lower, mu * lower - sigma * pdf
        tail_m = cumulative_from_top(self.q, self.density)
        tail_g = cumulative_from_top(self.q, self.q * self.density)
        m_up = float(np.interp(x, self.q, tail_m))
        g_up = float(np.interp(x, self.q, tail_g))
        if side == "sell":
            return m_up, g_up
        return float(tail_m[0]) - m_up, float(tail_g[0]) - g_up

    def min_density_accepted(self, x: float, side: str) -> float:
        if self.kind is OpponentKind.GAUSSIAN:
            return 0.0
        mask = self.q >= x if side == "sell" else self.q <= x
        return float(np.min(self.density[mask])) if np.any(mask) else 0.0

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` quotes; refuses sign-indefinite densities."""
        if self.kind is OpponentKind.GAUSSIAN:
            if self.sigma == 0:
                return np.full(n, self.mu)
            return rng.normal(self.mu, self.sigma, n)
        if not self.is_positive:
            raise SignIndefiniteError(
                "opponent density takes negative values and cannot be sampled; use exact mode"
            )
        fmax = float(np.max(self.density))
        lo, hi = float(self.q[0]), float(self.q[-1])
        out = np.empty(0)
        while len(out) < n:
            cand = rng.uniform(lo, hi, 2 * (n - len(out)) + 16)
            keep = rng.uniform(0.0, fmax, len(cand)) < np.interp(cand, self.q, self.density)
            out = np.concatenate([out, cand[keep]])
        return out[:n]


@dataclass(frozen=True)
class AdmissibilityRule:
    """``side``: "sell" accepts quotes ``q >= x``, "buy" accepts ``q <= x``.

    ``renormalize``: measure the conditional mean over accepted quotes instead
    of the per-game average (no deal counts as zero).
    """

    side: str = "sell"
    renormalize: bool = False

    def __post_init__(self):
        if self.side not in ("sell", "buy"):
            raise InvalidParameterError(f"side must be 'sell' or 'buy', got {self.side!r}")

    def accepts(self, quotes: np.ndarray, x: float) -> np.ndarray:
        return quotes >= x if self.side == "sell" else quotes <= x


DEFAULT_RULE = AdmissibilityRule()


@dataclass(frozen=True)
class GameRound:
    round: int
    estimate_Eq: float
    withdrawal_price_log: float


@dataclass(frozen=True)
class GameTrace:
    iterates: tuple[GameRound, ...]
    converged: bool
    fixed_point: float | None = None
    reason: str | None = None
    mode: str = "exact"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.iterates:
            raise InvalidParameterError("a game trace needs at least one round")

    def to_jsonl(self) -> str:
        """One JSON record per round, followed by a summary record."""
        lines = [
            json.dumps(
                {
                    "round": r.round,
                    "estimate_Eq": _finite_or_none(r.estimate_Eq),
                    "withdrawal_price_log": _finite_or_none(r.withdrawal_price_log),
                },
                allow_nan=False,
            )
            for r in self.iterates
        ]
        lines.append(
            json.dumps(
                {
                    "summary": True,
                    "mode": self.mode,
                    "converged": self.converged,
                    "fixed_point": self.fixed_point,
                    "reason": self.reason,
                    **self.meta,
                }
            )
        )
        return "\n".join(lines) + "\n"


def _finite_or_none(x):
    return float(x) if x is not None and math.isfinite(x) else None


def estimate_mean(samples) -> float:
    """Arithmetic mean of past observations."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidParameterError("cannot estimate a mean from no samples")
    return float(np.mean(arr))


def update_map(opponent: OpponentModel, x: float, rule: AdmissibilityRule = DEFAULT_RULE) -> float:
    """Exact next withdrawal log-price given the current one."""
    mass, gain = opponent.mass_and_gain(x, rule.side)
    if rule.renormalize:
        if not mass > 0:
            raise ZeroDivisionError("no admissible mass at this withdrawal price")
        return gain / mass
    return gain


def _breakdown(opponent, x, rule) -> str | None:
    mass, _ = opponent.mass_and_gain(x, rule.side)
    if not mass > 0:
        return f"restricted opponent mass {mass:.3g} <= 0 at x = {x:.6g}"
    if opponent.min_density_accepted(x, rule.side) < -_NEG_TOL * np.max(np.abs(opponent.density)):
        return (
            f"opponent measure is not positive on the admissible region at x = {x:.6g}; "
            "the fixed-point argument does not apply"
        )
    return None


def fixed_point_iterate(
    opponent: OpponentModel,
    x0: float = 0.0,
    tol: float = 1e-8,
    max_iter: int = 1000,
    rule: AdmissibilityRule = DEFAULT_RULE,
) -> GameTrace:
    """Iterate the exact update map from ``x0`` until a step is below ``tol``."""
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    if int(max_iter) < 1:
        raise InvalidParameterError(f"max_iter must be >= 1, got {max_iter}")
    x = float(x0)
    rounds = []
    for t in range(int(max_iter)):
        reason = None if opponent.kind is OpponentKind.GAUSSIAN else _breakdown(opponent, x, rule)
        if reason is not None:
            if not rounds:
                rounds.append(GameRound(t, float("nan"), x))
            return GameTrace(tuple(rounds), False, None, reason, "exact")
        est = update_map(opponent, x, rule)
        rounds.append(GameRound(t, est, x))
        if abs(est - x) < tol:
            return GameTrace(tuple(rounds), True, est, None, "exact")
        x = est
    return GameTrace(tuple(rounds), False, None, f"no convergence within {max_iter} rounds", "exact")


def simulate_repeated_game(
    opponent: OpponentModel,
    rounds: int,
    sample_size: int,
    seed: int,
    x0: float = 0.0,
    rule: AdmissibilityRule = DEFAULT_RULE,
    tol: float = 0.05,
) -> GameTrace:
    """Monte-Carlo play: each round's mean is estimated from ``sample_size`` quotes.

    Deterministic for a fixed ``seed``. Raises :class:`SignIndefiniteError`
    for opponents that cannot be sampled.
    """
    if int(rounds) < 1 or int(sample_size) < 1:
        raise InvalidParameterError("rounds and sample_size must be >= 1")
    if not opponent.is_positive:
        raise SignIndefiniteError(
            "opponent density takes negative values and cannot be sampled; use exact mode"
        )
    rng = np.random.default_rng(seed)
    x = float(x0)
    out = []
    reason = None
    for t in range(int(rounds)):
        quotes = opponent.sample(rng, int(sample_size))
        hit = rule.accepts(quotes, x)
        if rule.renormalize:
            if not np.any(hit):
                reason = f"no admissible quotes in round {t}"
                out.append(GameRound(t, x, x))
                break
            est = estimate_mean(quotes[hit])
        else:
            est = estimate_mean(np.where(hit, quotes, 0.0))
        out.append(GameRound(t, est, x))
        x = est
    last = out[-1]
    converged = reason is None and abs(last.estimate_Eq - last.withdrawal_price_log) < tol
    meta = {"seed": int(seed), "sample_size": int(sample_size)}
    return GameTrace(tuple(out), converged, last.estimate_Eq, reason, "monte_carlo", meta)
