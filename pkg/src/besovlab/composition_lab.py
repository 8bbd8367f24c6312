"""Lipschitz scaling functions (strictly increasing, bi-Lipschitz, fixing 0),
their validation and inversion, composition operators, and the composition
ratio experiments.

A scaler g has slopes pinched in [L1, L2] with 0 < L1 <= L2 < inf and
g(0) = 0, so |g(t)| is sandwiched by L1 |t| and L2 |t| pointwise and the
composition g(f(.)) distorts every discrete norm in a controlled band.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .differences import besov_diff_seminorm, growth_report, modulus_profile
from .grid import ZERO_TOL, GridError, GridFunction, lp_norm, sample
from .oscillation import osc_brackets
from .spaces import ScalerMeta, SpaceParams, composition_verdict
from .truncation_lab import EquivalenceReport, _experiment

__all__ = [
    "NotAScalingFunction",
    "LipschitzScaler",
    "linear_scaler",
    "sinusoidal_scaler",
    "table_scaler",
    "scaler_from_json",
    "validate_scaler",
    "compose",
    "abs_compose",
    "invert_scaler",
    "lp_bounds_check",
    "gprime_growth",
    "sublinearity_constant",
    "composition_experiment",
    "bracket_sandwich_check",
]

SCALER_TOL = 1e-12


class NotAScalingFunction(GridError):
    """Slope validation failed: not strictly increasing bi-Lipschitz."""


@dataclass(frozen=True)
class LipschitzScaler:
    """Evaluable scaler with claimed slope bounds.

    kinds: "linear" (a t), "sinusoidal" (a t + b sin t with a > |b|),
    "table" (monotone piecewise-linear interpolant through (0,0)).
    """

    kind: str
    params: tuple
    lip_lo: float
    lip_hi: float

    def __post_init__(self):
        if not (0.0 < self.lip_lo <= self.lip_hi < math.inf):
            raise NotAScalingFunction("need 0 < L1 <= L2 < inf")
        if abs(float(self(0.0))) > SCALER_TOL:
            raise NotAScalingFunction("g(0) must vanish")
        grid = np.linspace(-8.0, 8.0, 4097)
        dd = np.diff(self(grid)) / np.diff(grid)
        if dd.min() < self.lip_lo * (1.0 - 1e-9) or dd.max() > self.lip_hi * (1.0 + 1e-9):
            raise NotAScalingFunction(
                f"empirical slopes [{dd.min():.6g}, {dd.max():.6g}] escape the claimed "
                f"[{self.lip_lo:g}, {self.lip_hi:g}]")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "linear":
            (a,) = self.params
            out = a * t
        elif self.kind == "sinusoidal":
            a, b = self.params
            out = a * t + b * np.sin(t)
        elif self.kind == "table":
            knots, values = self.params
            kn = np.asarray(knots)
            va = np.asarray(values)
            lo_slope = (va[1] - va[0]) / (kn[1] - kn[0])
            hi_slope = (va[-1] - va[-2]) / (kn[-1] - kn[-2])
            out = np.interp(t, kn, va)
            out = np.where(t < kn[0], va[0] + lo_slope * (t - kn[0]), out)
            out = np.where(t > kn[-1], va[-1] + hi_slope * (t - kn[-1]), out)
        else:
            raise GridError(f"unknown scaler kind {self.kind!r}")
        return out if out.ndim else float(out)

    def to_json(self) -> str:
        if self.kind == "table":
            knots, values = self.params
            params = {"knots": list(map(float, knots)), "values": list(map(float, values))}
        else:
            params = {"coefficients": list(map(float, self.params))}
        return json.dumps({"kind": self.kind, "params": params,
                           "L1": self.lip_lo, "L2": self.lip_hi}, sort_keys=True)


def scaler_from_json(text: str) -> LipschitzScaler:
    try:
        obj = json.loads(text)
        kind = str(obj["kind"])
        if kind == "table":
            params = (tuple(obj["params"]["knots"]), tuple(obj["params"]["values"]))
        else:
            params = tuple(obj["params"]["coefficients"])
        return LipschitzScaler(kind, params, float(obj["L1"]), float(obj["L2"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise GridError(f"malformed scaler JSON: {exc}") from exc


def linear_scaler(a: float) -> LipschitzScaler:
    return LipschitzScaler("linear", (float(a),), float(a), float(a))


def sinusoidal_scaler(a: float = 1.0, b: float = 0.5) -> LipschitzScaler:
    if not abs(b) < a:
        raise NotAScalingFunction("sinusoidal scaler needs |b| < a")
    return LipschitzScaler("sinusoidal", (float(a), float(b)), a - abs(b), a + abs(b))


def table_scaler(knots, values) -> LipschitzScaler:
    kn = np.asarray(knots, dtype=float)
    va = np.asarray(values, dtype=float)
    if kn.ndim != 1 or kn.shape != va.shape or kn.size < 2:
        raise GridError("table scaler needs matching knot/value vectors")
    if not (np.diff(kn) > 0).all():
        raise GridError("table knots must be strictly increasing")
    slopes = np.diff(va) / np.diff(kn)
    if slopes.min() <= 0:
        raise NotAScalingFunction("table slopes must be positive")
    return LipschitzScaler("table", (tuple(kn), tuple(va)),
                           float(slopes.min()), float(slopes.max()))


def validate_scaler(g, lo: float, hi: float, step: float) -> tuple[float, float]:
    """Min/max divided differences over consecutive grid points on [lo, hi];
    a nonpositive minimum rejects g as a scaling function."""
    if not (hi > lo and step > 0):
        raise GridError("need lo < hi and step > 0")
    grid = np.arange(lo, hi + step / 2, step)
    dd = np.diff(np.asarray(g(grid), dtype=float)) / np.diff(grid)
    l1, l2 = float(dd.min()), float(dd.max())
    if l1 <= 0.0:
        raise NotAScalingFunction(f"minimum slope {l1:.3e} <= 0: not a scaling function")
    return l1, l2


def compose(g, f: GridFunction) -> GridFunction:
    """Sample-wise g(f(.))."""
    return f.map(lambda s: np.asarray(g(s), dtype=float), tag=f"g[{f.tag}]")


def abs_compose(g, f: GridFunction) -> GridFunction:
    """Sample-wise |g(f(.))|: identical to composing then truncating."""
    return f.map(lambda s: np.abs(np.asarray(g(s), dtype=float)), tag=f"absg[{f.tag}]")


def invert_scaler(g: LipschitzScaler, tau, tol: float = 1e-10):
    """Bisection inverse: |g(t) - tau| <= tol, bracket from the slope bounds.

    Accepts scalars or arrays; monotonicity makes the sign test well posed.
    """
    if not tol > 0:
        raise GridError("tol must be positive")
    t = np.asarray(tau, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    margin = tol / g.lip_lo
    lo = np.minimum(t / g.lip_lo, t / g.lip_hi) - margin
    hi = np.maximum(t / g.lip_lo, t / g.lip_hi) + margin
    if (np.asarray(g(lo)) > t).any() or (np.asarray(g(hi)) < t).any():
        raise GridError("bracketing failure: slope bounds do not enclose the target")
    width_goal = tol / g.lip_hi
    max_iter = 200
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        val = np.asarray(g(mid))
        high = val > t
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
        if float((hi - lo).max()) <= width_goal:
            break
    out = 0.5 * (lo + hi)
    return float(out[0]) if scalar else out


def lp_bounds_check(g: LipschitzScaler, f: GridFunction, p: float) -> dict:
    """Sandwich L1 ||f|| <= ||g o f|| <= L2 ||f|| and the exact equality of
    the composed and absolutely-composed L_p norms."""
    nf = lp_norm(f, p)
    ng = lp_norm(compose(g, f), p)
    na = lp_norm(abs_compose(g, f), p)
    return {
        "p": "inf" if math.isinf(p) else p,
        "norm_f": nf,
        "norm_composed": ng,
        "lower_ok": bool(g.lip_lo * nf <= ng),
        "upper_ok": bool(ng <= g.lip_hi * nf),
        "abs_equality_residual": abs(ng - na),
    }


def gprime_growth(g, lo: float, hi: float, level: int, p: float):
    """Growth report of the sampled derivative's first-difference seminorm
    at smoothness 1/p (central differences on the validation box).

    Finiteness is judged on the box: a "bounded" verdict stands in for the
    finite-seminorm side condition of the classifier.
    """
    side = int(math.ceil(hi - lo))
    f = sample(lambda t: np.asarray(g(t), dtype=float), level, (lo, side), 1, tag="scaler")
    h = f.spacing
    deriv = (f.samples[2:] - f.samples[:-2]) / (2.0 * h)
    gp = GridFunction(1, level, (lo + h,), deriv, tag="scaler-derivative")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    _, report = besov_diff_seminorm(gp, inv_p, p, math.inf, order=1,
                                    j_lo=1, j_hi=max(2, level - 2))
    return report


def sublinearity_constant(g, lo: float, hi: float, level: int, p: float) -> float:
    """Measured stand-in for the sublinearity constant: the order-2 seminorm
    at smoothness 1 + 1/p with q = 1 plus the sup of |g| on the range."""
    side = int(math.ceil(hi - lo))
    f = sample(lambda t: np.asarray(g(t), dtype=float), level, (lo, side), 1, tag="scaler")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    value, _ = besov_diff_seminorm(f, 1.0 + inv_p, p, 1.0, order=2,
                                   j_lo=1, j_hi=max(2, level - 2))
    return value + float(np.abs(f.samples).max())


def bracket_sandwich_check(g: LipschitzScaler, f: GridFunction) -> dict:
    """Term-wise L1 [f] <= [g o f] <= L2 [f] over every cube of every level."""
    gf = compose(g, f)
    violations = 0
    cubes = 0
    for j in range(0, f.level + 1):
        bf = osc_brackets(f, j).brackets
        bg = osc_brackets(gf, j).brackets
        cubes += bf.size
        violations += int(np.count_nonzero(bg < g.lip_lo * bf))
        violations += int(np.count_nonzero(bg > g.lip_hi * bf))
    return {"cubes": cubes, "violations": violations}


def _range_guard(g_range: tuple[float, float], corpus) -> None:
    lo, hi = g_range
    vmin = min(float(f.samples.min()) for f in corpus)
    vmax = max(float(f.samples.max()) for f in corpus)
    span = max(vmax - vmin, 1e-9)
    if vmin - 0.1 * span < lo or vmax + 0.1 * span > hi:
        raise GridError(
            f"scaler validation range [{lo}, {hi}] must cover the corpus value "
            f"range [{vmin:.3g}, {vmax:.3g}] with a 10% margin")


def composition_experiment(corpus, g: LipschitzScaler, kind: str, sp: SpaceParams,
                           operator: str = "g", g_range: tuple[float, float] = (-8.0, 8.0),
                           config: dict | None = None, **norm_opts) -> EquivalenceReport:
    """Ratio experiment for T f = g o f or |g| o f; under oscillation norms
    the per-cube sandwich is additionally verified term-wise."""
    if operator not in ("g", "abs-g"):
        raise GridError("operator must be 'g' or 'abs-g'")
    _range_guard(g_range, corpus)
    validate_scaler(g, g_range[0], g_range[1], 2.0 ** -8)
    gp = gprime_growth(g, g_range[0], g_range[1], 10, sp.p)
    meta = ScalerMeta(True, gp.verdict == "bounded")
    verdict = json.loads(composition_verdict(sp, meta).to_json())
    image = (lambda f: compose(g, f)) if operator == "g" else (lambda f: abs_compose(g, f))
    extras = {}
    if kind in ("osc-b", "osc-f") and operator == "g":
        agg = {"cubes": 0, "violations": 0}
        for f in corpus:
            r = bracket_sandwich_check(g, f)
            agg["cubes"] += r["cubes"]
            agg["violations"] += r["violations"]
        extras["bracket_sandwich"] = agg
    cfg = {"version": __version__, "space": sp.label(), "norm_kind": kind,
           "operator": operator, "scaler": json.loads(g.to_json())}
    if config:
        cfg.update(config)
    return _experiment(corpus, image, kind, sp, operator, verdict, cfg,
                       extras=extras, **norm_opts)
