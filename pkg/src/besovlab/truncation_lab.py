"""Truncation operators and the ratio experiments that measure one-sided,
two-sided, and membership behaviour of |f|, f+, f- against every discrete
norm in the package.

Experiments never assert a verdict: they measure ratio statistics and carry
the classifier's expected verdict side by side for the report reader.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .differences import besov_diff_seminorm, holder_norm, w1p_norm
from .faber import KIND_LINE, KIND_UNIT, b_faber_norm, f_faber_norm, faber_analyze
from .grid import ZERO_TOL, GridError, GridFunction, lp_norm
from .haar import analyze, b_sequence_norm, haar_counterexample
from .oscillation import b_osc_norm, f_osc_norm, osc_brackets
from .spaces import SpaceParams, norm_window_flags, truncation_verdict

__all__ = [
    "NORM_KINDS",
    "truncate",
    "discrete_norm",
    "RatioRow",
    "EquivalenceReport",
    "ratio_experiment",
    "counterexample_scaling",
    "counterexample_csv",
    "holder_perfect_check",
    "holder_witness_violations",
    "sobolev_identity_check",
]

NORM_KINDS = ("haar-seq", "faber-b", "faber-f", "osc-b", "osc-f", "diff", "holder", "w1p")


def truncate(f: GridFunction):
    """Sample-wise (|f|, f+, f-); f = f+ + f- and |f| = f+ - f- hold exactly."""
    absf = f.map(np.abs, tag=f"abs[{f.tag}]")
    pos = f.map(lambda s: np.maximum(s, 0.0), tag=f"pos[{f.tag}]")
    neg = f.map(lambda s: np.minimum(s, 0.0), tag=f"neg[{f.tag}]")
    return absf, pos, neg


def discrete_norm(f: GridFunction, kind: str, sp: SpaceParams, *,
                  haar_max_level: int | None = None,
                  faber_kind: str = KIND_UNIT,
                  diff_order: int | None = None) -> float:
    """Dispatch to the discrete norm named by ``kind`` at the parameters sp.

    haar-seq treats the samples minus the right faces as level-L cell values
    (the step discretization of f); faber kinds need the boundary-zero
    hypothesis and dimension 1.
    """
    if kind == "haar-seq":
        J = f.level if haar_max_level is None else haar_max_level
        return b_sequence_norm(analyze(f, J), sp.s, sp.p, sp.q)
    if kind == "faber-b":
        return b_faber_norm(faber_analyze(f, f.level - 1, faber_kind), sp.s, sp.p, sp.q)
    if kind == "faber-f":
        return f_faber_norm(faber_analyze(f, f.level - 1, faber_kind), sp.s, sp.p, sp.q)
    if kind == "osc-b":
        return b_osc_norm(f, sp.s, sp.p, sp.q)
    if kind == "osc-f":
        return f_osc_norm(f, sp.s, sp.p, sp.q)
    if kind == "diff":
        order = diff_order if diff_order is not None else (1 if sp.s < 1.0 else 2)
        value, _ = besov_diff_seminorm(f, sp.s, sp.p, sp.q, order=order)
        return value
    if kind == "holder":
        return holder_norm(f, sp.s)
    if kind == "w1p":
        return w1p_norm(f, sp.p)
    raise GridError(f"unknown norm kind {kind!r}; known: {NORM_KINDS}")


_OPERATORS = {"abs": 0, "pos": 1, "neg": 2}


@dataclass(frozen=True)
class RatioRow:
    tag: str
    norm_input: float
    norm_image: float
    ratio: float


@dataclass(frozen=True)
class EquivalenceReport:
    """Per-corpus ratio statistics for one operator under one norm."""

    norm_kind: str
    space: str
    operator: str
    level: int
    rows: tuple[RatioRow, ...]
    skipped_zero_input: int
    skipped_zero_image: int
    verdict: dict
    flags: dict
    config: dict
    extras: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.rows])

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min())

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def geometric_mean(self) -> float:
        return float(np.exp(np.mean(np.log(self.ratios))))

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio

    def to_json(self) -> str:
        return json.dumps(
            {
                "norm_kind": self.norm_kind,
                "space": self.space,
                "operator": self.operator,
                "level": self.level,
                "stats": {
                    "count": len(self.rows),
                    "min": self.min_ratio,
                    "max": self.max_ratio,
                    "geometric_mean": self.geometric_mean,
                    "spread": self.spread,
                },
                "skipped_zero_input": self.skipped_zero_input,
                "skipped_zero_image": self.skipped_zero_image,
                "verdict": self.verdict,
                "flags": self.flags,
                "config": self.config,
                "extras": self.extras,
                "rows": [
                    {"tag": r.tag, "norm_input": r.norm_input,
                     "norm_image": r.norm_image, "ratio": r.ratio}
                    for r in self.rows
                ],
            },
            sort_keys=True,
        )

    def to_csv(self) -> str:
        rows = ["tag,norm_f,norm_T,ratio"]
        for r in self.rows:
            rows.append(f"{r.tag},{r.norm_input!r},{r.norm_image!r},{r.ratio!r}")
        return "\n".join(rows) + "\n"


def _experiment(corpus, image_of: Callable, kind: str, sp: SpaceParams,
                operator: str, verdict: dict, config: dict,
                extras: dict | None = None, **norm_opts) -> EquivalenceReport:
    if not corpus:
        raise GridError("empty corpus")
    rows = []
    skipped_in = skipped_im = 0
    level = corpus[0].level
    for f in corpus:
        nf = discrete_norm(f, kind, sp, **norm_opts)
        if nf <= ZERO_TOL:
            skipped_in += 1
            continue
        nt = discrete_norm(image_of(f), kind, sp, **norm_opts)
        if nt <= ZERO_TOL:
            skipped_im += 1
            continue
        rows.append(RatioRow(f.tag, nf, nt, nt / nf))
    if not rows:
        raise GridError("no corpus member survived the zero-norm cutoff")
    return EquivalenceReport(kind, sp.label(), operator, level, tuple(rows),
                             skipped_in, skipped_im, verdict,
                             norm_window_flags(kind, sp), config, extras or {})


def ratio_experiment(corpus: Sequence[GridFunction], kind: str, sp: SpaceParams,
                     operator: str = "abs", config: dict | None = None,
                     **norm_opts) -> EquivalenceReport:
    """Measure ||T f|| / ||f|| over the corpus for T in {abs, pos, neg}."""
    if operator not in _OPERATORS:
        raise GridError(f"operator must be one of {tuple(_OPERATORS)}")
    pick = _OPERATORS[operator]
    cfg = {"version": __version__, "space": sp.label(), "norm_kind": kind,
           "operator": operator}
    if config:
        cfg.update(config)
    return _experiment(corpus, lambda f: truncate(f)[pick], kind, sp, operator,
                       json.loads(truncation_verdict(sp).to_json()), cfg, **norm_opts)


def counterexample_scaling(s: float, p: float, q: float, n: int, j_max: int) -> list[dict]:
    """Sequence-norm table of the alternating-sign family against its
    absolute value: the ratio column is exactly 2^{j s}."""
    if j_max < 0:
        raise GridError("j_max must be >= 0")
    out = []
    for j in range(j_max + 1):
        level = j + 1
        f = haar_counterexample(j, n, level)
        absf = truncate(f)[0]
        nf = b_sequence_norm(analyze(f, j), s, p, q)
        na = b_sequence_norm(analyze(absf, j), s, p, q)
        out.append({"j": j, "norm_f": nf, "norm_abs": na, "ratio": nf / na,
                    "expected": 2.0 ** (j * s)})
    return out


def counterexample_csv(rows: list[dict]) -> str:
    lines = ["j,norm_f,norm_abs,ratio,expected"]
    for r in rows:
        lines.append(f"{r['j']},{r['norm_f']!r},{r['norm_abs']!r},{r['ratio']!r},{r['expected']!r}")
    return "\n".join(lines) + "\n"


def holder_witness_violations(f: GridFunction, s: float) -> dict:
    """Brute-force the three-point inequality behind the two-sided Hoelder
    bound on every sign-changing node pair.

    For nodes x, y with f(x) > 0 > f(y) and z the min-|f| node between them,
    (f(x)-f(y)) / |x-y|^s must not exceed the |f|-side quotients; the near
    zero value at z enters as an explicit slack, one grid cell's worth.
    """
    if f.dim != 1:
        raise GridError("witness scan is one-dimensional")
    a = f.samples
    n = a.shape[0]
    h = f.spacing
    absa = np.abs(a)
    run_min = absa.copy()
    run_arg = np.arange(n)
    checked = violations = 0
    worst = 0.0
    for sep in range(1, n):
        upd = absa[sep:] < run_min[:-1]
        run_min = np.where(upd, absa[sep:], run_min[:-1])
        run_arg = np.where(upd, np.arange(sep, n), run_arg[:-1])
        both = (a[: n - sep] > 0) & (a[sep:] < 0) | (a[: n - sep] < 0) & (a[sep:] > 0)
        idx = np.flatnonzero(both)
        if not idx.size:
            continue
        i = idx
        kx = idx + sep
        zi = run_arg[idx]
        interior = (zi != i) & (zi != kx)
        i, kx, zi = i[interior], kx[interior], zi[interior]
        if not i.size:
            continue
        lhs = np.abs(a[i] - a[kx]) / (sep * h) ** s
        dxz = (np.abs(zi - i) * h) ** s
        dyz = (np.abs(kx - zi) * h) ** s
        rhs = (absa[i] - absa[zi]) / dxz + (absa[kx] - absa[zi]) / dyz
        slack = absa[zi] * (1.0 / dxz + 1.0 / dyz)
        excess = lhs - (rhs + slack)
        checked += int(i.size)
        bad = excess > 1e-12
        violations += int(np.count_nonzero(bad))
        if bad.any():
            worst = max(worst, float(excess[bad].max()))
    return {"checked": checked, "violations": violations, "worst_excess": worst}


def holder_perfect_check(corpus: Sequence[GridFunction], s: float) -> dict:
    """One-sided inequality ||(|f|)|| <= ||f|| checked exactly, two-sided
    spread recorded, witness triples exercised on sign-changing members."""
    one_sided_failures = 0
    ratios = []
    witness = {"checked": 0, "violations": 0, "worst_excess": 0.0}
    for f in corpus:
        nf = holder_norm(f, s)
        na = holder_norm(truncate(f)[0], s)
        if na > nf:
            one_sided_failures += 1
        if nf > ZERO_TOL:
            ratios.append(na / nf)
        if (f.samples > 0).any() and (f.samples < 0).any():
            w = holder_witness_violations(f, s)
            witness["checked"] += w["checked"]
            witness["violations"] += w["violations"]
            witness["worst_excess"] = max(witness["worst_excess"], w["worst_excess"])
    ratios = np.asarray(ratios)
    return {
        "one_sided_failures": one_sided_failures,
        "min_ratio": float(ratios.min()),
        "max_ratio": float(ratios.max()),
        "spread": float(ratios.max() / ratios.min()),
        "witness": witness,
    }


def _sign_change_cells(f: GridFunction) -> int:
    count = 0
    for axis in range(f.dim):
        a = np.moveaxis(f.samples, axis, 0)
        count += int(np.count_nonzero(a[1:] * a[:-1] < 0.0))
    return count


def sobolev_identity_check(corpus: Sequence[GridFunction], p: float) -> dict:
    """|  ||(|f|)||_W - ||f||_W  | against the sign-change-cell bound.

    The gap is at most 2 Lip 2^{-L/p} (cell count)^{1/p}; the empirical
    constant is reported per member.
    """
    if not (1.0 < p < math.inf):
        raise GridError("p must lie in (1, inf)")
    rows = []
    for f in corpus:
        gap = abs(w1p_norm(truncate(f)[0], p) - w1p_norm(f, p))
        cells = _sign_change_cells(f)
        scale = 2.0 ** (-f.level / p) * cells ** (1.0 / p) if cells else 0.0
        rows.append({"tag": f.tag, "gap": gap, "sign_change_cells": cells,
                     "bound_scale": scale,
                     "constant": gap / scale if scale > 0 else 0.0})
    return {"rows": rows,
            "max_constant": max(r["constant"] for r in rows),
            "max_gap": max(r["gap"] for r in rows)}
