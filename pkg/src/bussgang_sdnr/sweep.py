"""Sweeps of the quantization interval and search for the SDNR-optimal delta."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from bussgang_sdnr.bussgang import mu_y2_given_s, mu_y_given_s, s_coefficients, sdnr
from bussgang_sdnr.errors import BussgangError, DomainError, UsageError
from bussgang_sdnr.output import Table
from bussgang_sdnr.quantizer import MidRiseQuantizer
from bussgang_sdnr.signal_model import SignalDistribution, binary, pam4
from bussgang_sdnr.special_math import DEFAULT_QUADRATURE, QuadratureSpec

SWEEP_COLUMNS = ("delta", "alpha_s", "gamma_s", "sdnr_linear", "sdnr_db")

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MIN_COARSE_POINTS = 200
DELTA_TOLERANCE = 1e-5


class SweepRow(NamedTuple):
    delta: float
    alpha_s: float
    gamma_s: float
    sdnr_linear: float
    sdnr_db: float
    error: str | None = None


class Optimum(NamedTuple):
    delta_star: float
    sdnr_star: float
    at_boundary: bool = False

    @property
    def sdnr_db(self) -> float:
        return 10.0 * math.log10(self.sdnr_star)


@dataclass
class SweepResult:
    rows: list
    optimum: Optimum
    config: dict = field(default_factory=dict)

    def to_table(self) -> Table:
        return Table(SWEEP_COLUMNS, [tuple(r[:5]) for r in self.rows])


def make_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid, rounded to suppress accumulation drift."""
    if not step > 0 or not hi >= lo:
        raise DomainError("grid needs step > 0 and hi >= lo", quantity="grid")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def _row(levels, d, sigma_n, delta, spec) -> SweepRow:
    try:
        q = MidRiseQuantizer(levels, float(delta))
        c = s_coefficients(q, d, sigma_n, spec)
        rep = sdnr(q, d, sigma_n, spec)
    except BussgangError as exc:
        nan = math.nan
        return SweepRow(float(delta), nan, nan, nan, nan, error=str(exc))
    return SweepRow(float(delta), c.alpha, c.gamma, rep.sdnr_linear, rep.sdnr_db)


def _objective(levels, d, sigma_n, spec):
    def value(delta):
        try:
            return sdnr(MidRiseQuantizer(levels, float(delta)), d, sigma_n, spec).sdnr_linear
        except BussgangError:
            return -math.inf
    return value


def _golden_max(fun, a, b, tol):
    c = b - GOLDEN * (b - a)
    e = a + GOLDEN * (b - a)
    fc, fe = fun(c), fun(e)
    while b - a > tol:
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, e, fe
            e = a + GOLDEN * (b - a)
            fe = fun(e)
    return (c, fc) if fc >= fe else (e, fe)


def optimize_delta(levels: int, d: SignalDistribution, sigma_n: float, bracket=(0.01, 2.0),
                   spec: QuadratureSpec = DEFAULT_QUADRATURE, coarse=None) -> Optimum:
    """Global coarse scan over ``bracket`` followed by golden-section refinement.

    ``coarse`` overrides the scan points (at least 200 evenly spaced points
    are used otherwise). ``at_boundary`` is set when the coarse maximum sits
    on an end of the bracket, i.e. there is no interior peak.
    """
    lo, hi = bracket
    if not 0 < lo < hi:
        raise DomainError(f"bracket must satisfy 0 < lo < hi, got {bracket}", quantity="bracket")
    fun = _objective(levels, d, sigma_n, spec)
    xs = np.linspace(lo, hi, MIN_COARSE_POINTS + 1) if coarse is None else np.asarray(coarse, dtype=float)
    ys = np.array([fun(x) for x in xs])
    if not np.any(np.isfinite(ys)):
        raise DomainError("SDNR undefined over the whole bracket", quantity="sdnr")
    i = int(np.argmax(ys))
    boundary = i == 0 or i == len(xs) - 1
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    x_star, f_star = _golden_max(fun, float(a), float(b), DELTA_TOLERANCE)
    if ys[i] > f_star:
        x_star, f_star = float(xs[i]), float(ys[i])
    return Optimum(float(x_star), float(f_star), boundary)


def sweep_delta(levels: int, d: SignalDistribution, sigma_n: float, delta_grid,
                spec: QuadratureSpec = DEFAULT_QUADRATURE) -> SweepResult:
    grid = np.asarray(delta_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("delta grid must be non-empty, positive and strictly increasing", quantity="delta_grid")
    rows = [_row(levels, d, sigma_n, x, spec) for x in grid]
    if grid.size > 1:
        coarse = grid if grid.size >= MIN_COARSE_POINTS else None
        optimum = optimize_delta(levels, d, sigma_n, (grid[0], grid[-1]), spec, coarse)
    else:
        optimum = Optimum(float(grid[0]), rows[0].sdnr_linear, True)
    config = {"levels": levels, "distribution": d, "sigma_n": sigma_n}
    return SweepResult(rows, optimum, config)


FIGURE_DEFAULTS = {
    1: {"levels": 8, "delta": 1.0, "sigma_n": (0.1, 0.5, 0.9), "lo": -5.0, "hi": 5.0, "step": 0.05},
    2: {"levels": 8, "delta": 1.0, "sigma_n": (0.1, 0.5, 0.9), "lo": -5.0, "hi": 5.0, "step": 0.05},
    3: {"levels": 8, "amplitude": 1.0, "sigma_n": math.sqrt(0.5), "lo": 0.01, "hi": 2.0, "step": 0.005},
    4: {"levels": 8, "amplitude": math.sqrt(0.2), "sigma_n": math.sqrt(0.5), "lo": 0.01, "hi": 2.0, "step": 0.005},
}


def emit_figure_data(figure_id: int, overrides: dict | None = None,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Table:
    """Curve data behind the four figures.

    Figures 1 and 2: conditional mean / second moment of the output against
    s for each noise level (long format). Figures 3 and 4: delta sweeps for
    binary and 4-PAM signals.
    """
    if figure_id not in FIGURE_DEFAULTS:
        raise UsageError(f"unknown figure id {figure_id!r}; expected 1-4")
    cfg = dict(FIGURE_DEFAULTS[figure_id])
    cfg.update({k: v for k, v in (overrides or {}).items() if v is not None})
    grid = make_grid(cfg["lo"], cfg["hi"], cfg["step"])

    if figure_id in (1, 2):
        q = MidRiseQuantizer(cfg["levels"], cfg["delta"])
        sigmas = cfg["sigma_n"]
        sigmas = (sigmas,) if np.ndim(sigmas) == 0 else tuple(sigmas)
        moment, name = (mu_y_given_s, "mu_y_given_s") if figure_id == 1 else (mu_y2_given_s, "mu_y2_given_s")
        rows = []
        for sn in sigmas:
            values = moment(q, sn, grid)
            rows.extend((float(sn), float(s), float(v)) for s, v in zip(grid, values))
        return Table(("sigma_n", "s", name), rows)

    d = binary(cfg["amplitude"]) if figure_id == 3 else pam4(cfg["amplitude"])
    return sweep_delta(cfg["levels"], d, cfg["sigma_n"], grid, spec).to_table()
