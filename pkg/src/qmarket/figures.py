"""Data behind each figure: default parameters, emitted series, oracle checks.

Figure ids follow the series they emit:

========  ==========================================================
fig1      D_3(0.9) demand density vs. interference-free mixture
fig2      D_3(-0.9) demand density vs. mixture
fig3      D_0.2(-sqrt 0.9) demand density vs. mixture
fig4      demand curves of fig3
fig5      supply densities of D_3(1) and D_3(-i)
fig5b     supply densities of D_3(-1) and D_3(i)
fig6      Wigner field of D_0.2(-sqrt 0.9)
fig7      conditional demand of D_0.2(-sqrt 0.9) at p = 0.4
fig8      conditional demand of D_0.2(-1/sqrt 0.9) at p = -0.2
========  ==========================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .curves import conditional_demand, cumulative_from_top, demand_curve, detect_giffen, integrated_anomaly_check
from .errors import InvalidParameterError
from .spectral import dft_supply, supply_density, supply_density_quadrature, to_supply
from .strategy import (
    GridSpec,
    amplitude_q,
    classical_mixture_density,
    density_q,
    moments,
    norm_squared_quadrature,
    sample,
    standard_gaussian,
    upper_tail,
)
from .tactics import apply, from_z
from .wigner import wigner_field, wigner_point_quadrature, wigner_values

__all__ = ["FIGURES", "FigureJob", "FigureResult", "run_figure", "figure_oracle", "tactic_strategy"]

SQRT09 = math.sqrt(0.9)

_WIDE = GridSpec(-8.0, 11.0, 1024)
_NARROW = GridSpec(-6.0, 6.2, 1024)
_PGRID = GridSpec(-4.0, 4.0, 256)
_PGRID_SLICE = GridSpec(-4.0, 4.0, 201)  # has rows at p = 0.4 and p = -0.2
_PGRID_SUPPLY = GridSpec(-4.0, 4.0, 1024)

FIGURES: dict[str, dict] = {
    "fig1": dict(kind="density", delta=3.0, z=0.9, grid=_WIDE),
    "fig2": dict(kind="density", delta=3.0, z=-0.9, grid=_WIDE),
    "fig3": dict(kind="density", delta=0.2, z=-SQRT09, grid=_NARROW),
    "fig4": dict(kind="demand", delta=0.2, z=-SQRT09, grid=_NARROW),
    "fig5": dict(kind="supply", delta=3.0, z=1.0, z2=-1j, grid=_PGRID_SUPPLY),
    "fig5b": dict(kind="supply", delta=3.0, z=-1.0, z2=1j, grid=_PGRID_SUPPLY),
    "fig6": dict(kind="wigner", delta=0.2, z=-SQRT09, pgrid=_PGRID, qgrid=_NARROW),
    "fig7": dict(kind="conditional", delta=0.2, z=-SQRT09, p=0.4, pgrid=_PGRID_SLICE, qgrid=_NARROW),
    "fig8": dict(kind="conditional", delta=0.2, z=-1.0 / SQRT09, p=-0.2, pgrid=_PGRID_SLICE, qgrid=_NARROW),
}


@dataclass(frozen=True)
class FigureJob:
    figure_id: str
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in FIGURES:
            raise InvalidParameterError(
                f"unknown figure {self.figure_id!r}; choose from {', '.join(FIGURES)}"
            )
        base = FIGURES[self.figure_id]
        unknown = set(self.overrides) - set(base) - {"hbar_e"}
        if unknown:
            raise InvalidParameterError(
                f"{self.figure_id} does not take override(s): {', '.join(sorted(unknown))}"
            )

    @property
    def params(self) -> dict:
        out = dict(FIGURES[self.figure_id])
        out.setdefault("hbar_e", 1.0)
        out.update({k: v for k, v in self.overrides.items() if v is not None})
        return out


@dataclass(frozen=True, eq=False)
class FigureResult:
    figure_id: str
    columns: dict
    report: dict
    field: object = None


def tactic_strategy(delta: float, z, hbar_e: float = 1.0):
    """Result of the tactic ``D_delta(z)`` applied to the standard Gaussian strategy."""
    return apply(from_z(delta, z), standard_gaussian(hbar_e))


def _zrepr(z):
    z = complex(z)
    return [z.real, z.imag]


def run_figure(job: FigureJob) -> FigureResult:
    prm = job.params
    kind = prm["kind"]
    s = tactic_strategy(prm["delta"], prm["z"], prm["hbar_e"])
    base_report = {
        "figure": job.figure_id,
        "delta": prm["delta"],
        "z": _zrepr(prm["z"]),
        "hbar_e": prm["hbar_e"],
    }

    if kind == "density":
        q = prm["grid"].points
        quantum = density_q(s, q)
        classical = classical_mixture_density(prm["z"], prm["delta"], q)
        cols = {"q": q, "density_quantum": quantum, "density_classical": classical}
        q0, sigma = moments(s)
        rep = {
            **base_report,
            "integral_quantum": float(integrate.trapezoid(quantum, q)),
            "q0": q0,
            "sigma": sigma,
        }
        return FigureResult(job.figure_id, cols, rep)

    if kind == "demand":
        q = prm["grid"].points
        q0, sigma = moments(s)
        cq = demand_curve(q, density_q(s, q), q0=q0, sigma=sigma)
        cc = demand_curve(q, classical_mixture_density(prm["z"], prm["delta"], q))
        cols = {
            "q": q,
            "price": cq.prices(),
            "demand_quantum": cq.cumulative,
            "demand_classical": cc.cumulative,
        }
        gap = np.abs(cq.cumulative - cc.cumulative)
        rep = {
            **base_report,
            "q0": q0,
            "sigma": sigma,
            "monotone_quantum": detect_giffen(cq).monotone,
            "max_gap": float(gap.max()),
            "max_gap_q": float(q[int(np.argmax(gap))]),
        }
        return FigureResult(job.figure_id, cols, rep)

    if kind == "supply":
        p = prm["grid"].points
        s2 = tactic_strategy(prm["delta"], prm["z2"], prm["hbar_e"])
        d1 = supply_density(to_supply(s), p)
        d2 = supply_density(to_supply(s2), p)
        cols = {"p": p, "supply_solid": d1, "supply_dashed": d2}
        rep = {**base_report, "z2": _zrepr(prm["z2"]), "p_axis": "p decreases as the unit price rises"}
        return FigureResult(job.figure_id, cols, rep)

    if kind == "wigner":
        f = wigner_field(s, prm["pgrid"], prm["qgrid"])
        P, Q = np.meshgrid(f.pgrid.points, f.qgrid.points, indexing="ij")
        cols = {"p": P.ravel(), "q": Q.ravel(), "W": f.values.ravel()}
        i, j = np.unravel_index(int(np.argmin(f.values)), f.values.shape)
        rep = {
            **base_report,
            "min_W": float(f.values[i, j]),
            "argmin_p": float(f.pgrid.points[i]),
            "argmin_q": float(f.qgrid.points[j]),
            "max_W": float(f.values.max()),
            "pgrid": [f.pgrid.lo, f.pgrid.hi, f.pgrid.n],
            "qgrid": [f.qgrid.lo, f.qgrid.hi, f.qgrid.n],
        }
        return FigureResult(job.figure_id, cols, rep, f)

    if kind == "conditional":
        f = wigner_field(s, prm["pgrid"], prm["qgrid"])
        q0, sigma = moments(s)
        curve = conditional_demand(f, prm["p"], q0=q0, sigma=sigma)
        q = curve.coords
        gr = detect_giffen(curve)
        marginal = demand_curve(q, density_q(s, q), q0=q0, sigma=sigma)
        from .wigner import slice_at_p

        sl = slice_at_p(f, prm["p"])
        cols = {
            "q": q,
            "price": curve.prices(),
            "slice": sl.values / curve.scale,
            "demand_conditional": curve.cumulative,
            "demand_marginal": marginal.cumulative,
        }
        rep = {
            **base_report,
            "p": prm["p"],
            "q0": q0,
            "sigma": sigma,
            "slice_integral": curve.scale,
            "slice_min": float(sl.values.min()),
            "giffen": gr.to_dict(),
            "marginal_monotone": detect_giffen(marginal).monotone,
            "field_marginal_monotone": integrated_anomaly_check(f),
        }
        return FigureResult(job.figure_id, cols, rep, f)

    raise InvalidParameterError(f"unknown figure kind {kind!r}")  # pragma: no cover


def figure_oracle(job: FigureJob, result: FigureResult | None = None) -> dict:
    """Independent cross-checks of a figure's data; maps check name to deviation."""
    prm = job.params
    result = result or run_figure(job)
    s = tactic_strategy(prm["delta"], prm["z"], prm["hbar_e"])
    cols = result.columns
    dev = {}
    kind = prm["kind"]

    if kind == "density":
        q = cols["q"]
        direct = np.abs(amplitude_q(s, q)) ** 2 / norm_squared_quadrature(s)
        dev["density_vs_quadrature_norm"] = float(np.max(np.abs(direct - cols["density_quantum"])))
        if not math.isinf(abs(complex(prm["z"]))):
            imag = tactic_strategy(prm["delta"], 1j * abs(complex(prm["z"])), prm["hbar_e"])
            dev["mixture_vs_imaginary_z"] = float(
                np.max(np.abs(density_q(imag, q) - cols["density_classical"]))
            )
        dev["quantum_total_mass"] = abs(float(integrate.trapezoid(cols["density_quantum"], q)) - 1.0)

    elif kind == "demand":
        q = cols["q"]
        exact = upper_tail(s, q) - upper_tail(s, q[-1])
        dev["demand_vs_closed_form"] = float(np.max(np.abs(exact - cols["demand_quantum"])))
        r2 = abs(complex(prm["z"])) ** 2
        from scipy.special import erfc

        def tail(a):
            return 0.5 * erfc((a - np.array([0.0, prm["delta"]])[:, None]) / math.sqrt(2.0))

        t = tail(q) - tail(np.array([q[-1]]))
        classical = (t[0] + r2 * t[1]) / (1.0 + r2)
        dev["classical_vs_closed_form"] = float(np.max(np.abs(classical - cols["demand_classical"])))

    elif kind == "supply":
        p = cols["p"]
        for name, z in (("solid", prm["z"]), ("dashed", prm["z2"])):
            st = tactic_strategy(prm["delta"], z, prm["hbar_e"])
            lo, hi = st.support(8.0)
            dft = dft_supply(sample(st, GridSpec(lo, hi, 2048)))
            pts = dft.grid.points
            keep = (pts >= p[0]) & (pts <= p[-1])
            numeric = np.abs(dft.values[keep]) ** 2
            analytic = supply_density(to_supply(st), pts[keep])
            dev[f"{name}_dft_vs_analytic"] = float(np.max(np.abs(numeric - analytic)))
            spots = p[:: max(1, len(p) // 16)]
            quad = np.array([supply_density_quadrature(st, x) for x in spots])
            dev[f"{name}_quadrature_spots"] = float(
                np.max(np.abs(quad - cols[f"supply_{name}"][:: max(1, len(p) // 16)]))
            )

    elif kind == "wigner":
        f = result.field
        P = f.pgrid.points[:, None]
        Q = f.qgrid.points[None, :]
        dev["demand_vs_supply_formula"] = float(np.max(np.abs(wigner_values(s, P, Q, "supply") - f.values)))
        rows = np.linspace(0, f.pgrid.n - 1, 4).astype(int)
        colsel = np.linspace(0, f.qgrid.n - 1, 4).astype(int)
        spot = max(
            abs(wigner_point_quadrature(s, f.pgrid.points[i], f.qgrid.points[j]) - f.values[i, j])
            for i in rows
            for j in colsel
        )
        dev["quadrature_spots"] = float(spot)

    elif kind == "conditional":
        q = cols["q"]
        row = wigner_values(s, prm["p"], q, "supply")
        total = float(cumulative_from_top(q, row)[0])
        dev["slice_vs_supply_formula"] = float(np.max(np.abs(row / total - cols["slice"])))
        curve = cumulative_from_top(q, row / total)
        dev["curve_vs_supply_formula"] = float(np.max(np.abs(curve - cols["demand_conditional"])))
        idx = np.arange(0, len(q), max(1, len(q) // 32))
        quad = np.array([wigner_point_quadrature(s, prm["p"], q[i]) for i in idx]) / total
        dev["slice_quadrature_spots"] = float(np.max(np.abs(quad - cols["slice"][idx])))

    return dev
