import math

import numpy as np
import pytest
from hypothesis import strategies as st
from scipy import integrate

from qmarket.strategy import GaussianComponent, Strategy
from qmarket.errors import ZeroAmplitudeError

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    def record(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


def quad_line(f, lo=-40.0, hi=40.0, points=None):
    """Adaptive quadrature over a finite window, split at ``points``."""
    cuts = sorted({lo, hi, *(x for x in (points or []) if lo < x < hi)})
    return sum(
        integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        for a, b in zip(cuts[:-1], cuts[1:])
    )


def make_strategy(weights, shifts, widths=None, hbar_e=1.0):
    widths = widths or [1.0] * len(weights)
    return Strategy(
        tuple(GaussianComponent(w, a, s) for w, a, s in zip(weights, shifts, widths)),
        hbar_e=hbar_e,
    )


def random_strategy(rng, kmax=3, shift=3.0, wmax=2.0, widths=(0.6, 1.6), hbar_e=1.0):
    """Random superposition that is safely away from total cancellation."""
    while True:
        k = int(rng.integers(1, kmax + 1))
        w = rng.uniform(-wmax, wmax, k) + 1j * rng.uniform(-wmax, wmax, k)
        a = rng.uniform(-shift, shift, k)
        s = rng.uniform(*widths, k)
        try:
            strat = make_strategy(list(w), list(a), list(s), hbar_e)
        except ZeroAmplitudeError:
            continue
        if strat._norm > 1e-3:
            return strat


@st.composite
def superpositions(draw, max_components=5, max_shift=6.0, max_weight=2.0, widths=(0.5, 2.0)):
    k = draw(st.integers(1, max_components))
    fl = lambda lo, hi: st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    comps = []
    for _ in range(k):
        r = draw(fl(0.05, max_weight))
        phi = draw(fl(-math.pi, math.pi))
        comps.append(
            GaussianComponent(r * complex(math.cos(phi), math.sin(phi)), draw(fl(-max_shift, max_shift)), draw(fl(*widths)))
        )
    try:
        s = Strategy(tuple(comps))
    except ZeroAmplitudeError:
        s = Strategy((GaussianComponent(1.0),))
    if s._norm < 1e-3:
        s = Strategy((GaussianComponent(1.0),))
    return s
