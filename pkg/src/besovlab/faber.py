"""Hat (tent) system on dyadic intervals: second-difference coefficients,
discretized B- and F-norms on the unit interval and on the line, and the
local homogeneity check.  Dimension 1 only; higher dimensions go through
the slice machinery instead.

The coefficient of a sampled f at (j, m) is the second difference
(f(x+2h) - 2 f(x+h) + f(x)) at x = 2^-j m with h = 2^-j-1: pure node
arithmetic, no quadrature.  The expansion itself carries a factor -1/2 in
front of each hat; norms use the raw second differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridError, GridFunction

__all__ = [
    "FaberBoundaryError",
    "FaberCoeffs",
    "hat_eval",
    "faber_analyze",
    "faber_synthesize",
    "b_faber_norm",
    "f_faber_norm",
    "homogeneity_ratio",
    "HomogeneityResult",
]

BOUNDARY_TOL = 1e-12

KIND_UNIT = "unit-interval"
KIND_LINE = "real-line-compact"


class FaberBoundaryError(GridError):
    """The zero-at-integers hypothesis of the expansion is violated."""


@dataclass(frozen=True)
class FaberCoeffs:
    """Second-difference coefficients d_{j,m}, dense per level.

    unit-interval kind: box [0,1], m in 0..2^j-1.
    real-line-compact kind: integer box, m over the box cells at level j.
    """

    max_level: int
    kind: str
    corner: int
    side: int
    levels: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (KIND_UNIT, KIND_LINE):
            raise GridError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == KIND_UNIT and (self.corner != 0 or self.side != 1):
            raise GridError("unit-interval coefficients live on [0, 1]")
        for j, arr in self.levels.items():
            if arr.shape != (self.side * 2 ** j,):
                raise GridError(f"level-{j} array must have {self.side * 2 ** j} entries")

    def level(self, j: int) -> np.ndarray:
        return self.levels.get(j, np.zeros(self.side * 2 ** j))

    def to_json(self) -> str:
        ents = []
        for j in sorted(self.levels):
            arr = self.levels[j]
            for i in np.flatnonzero(arr):
                ents.append({"j": j, "m": [int(i) + self.corner * 2 ** j],
                             "value": float(arr[i])})
        return json.dumps(
            {"J": self.max_level, "kind": self.kind,
             "box": {"corner": [self.corner], "side": self.side},
             "entries": ents},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "FaberCoeffs":
        obj = json.loads(text)
        out = FaberCoeffs(int(obj["J"]), str(obj["kind"]),
                          int(obj["box"]["corner"][0]), int(obj["box"]["side"]))
        for e in obj["entries"]:
            j = int(e["j"])
            if j not in out.levels:
                out.levels[j] = np.zeros(out.side * 2 ** j)
            out.levels[j][int(e["m"][0]) - out.corner * 2 ** j] = float(e["value"])
        return out


def hat_eval(j: int, m: int, x):
    """Tent of height 1 on [2^-j m, 2^-j (m+1)], peak at the midpoint."""
    x = np.asarray(x, dtype=float)
    left = 2.0 ** -j * m
    mid = left + 2.0 ** -(j + 1)
    right = left + 2.0 ** -j
    up = 2.0 ** (j + 1) * (x - left)
    down = 2.0 ** (j + 1) * (right - x)
    return np.where((x >= left) & (x < mid), up,
                    np.where((x >= mid) & (x < right), down, 0.0))


def _check_zeros(f: GridFunction, node_indices: np.ndarray):
    vals = f.samples[node_indices]
    bad = np.flatnonzero(np.abs(vals) > BOUNDARY_TOL)
    if bad.size:
        i = int(node_indices[bad[0]])
        x = f.corner[0] + i * f.spacing
        raise FaberBoundaryError(
            f"boundary hypothesis violated: |f({x})| = {abs(f.samples[i]):.3e} at node {i}")


def faber_analyze(f: GridFunction, max_level: int, kind: str = KIND_UNIT) -> FaberCoeffs:
    """Second differences of the node values, levels 0..max_level <= L-1.

    unit-interval kind needs f on [0,1] with f(0) = f(1) = 0; the line kind
    needs an integer box with f vanishing at every integer node (tolerance
    1e-12, violations are rejected naming the node).
    """
    if f.dim != 1:
        raise GridError("hat analysis is one-dimensional")
    if not f.has_integer_box():
        raise GridError("hat analysis needs an integer box")
    L = f.level
    if not 0 <= max_level <= L - 1:
        raise GridError(f"max_level must lie in 0..{L - 1}")
    corner, side = int(round(f.corner[0])), f.side
    if kind == KIND_UNIT and (corner, side) != (0, 1):
        raise GridError("unit-interval analysis expects the box [0, 1]")
    n = f.samples.shape[0]
    integer_nodes = np.arange(0, n, 2 ** L)
    if kind == KIND_UNIT:
        _check_zeros(f, np.array([0, n - 1]))
    else:
        _check_zeros(f, integer_nodes)
    levels = {}
    s = f.samples
    for j in range(0, max_level + 1):
        step = 2 ** (L - j)       # nodes per level-j cell
        half = step // 2
        base = np.arange(0, n - step, step)
        levels[j] = s[base + step] - 2.0 * s[base + half] + s[base]
    return FaberCoeffs(max_level, kind, corner, side, levels)


def faber_synthesize(c: FaberCoeffs, level: int) -> GridFunction:
    """Node values of -1/2 sum d_{j,m} hat_{j,m}: exact for sampled piecewise
    linear functions with dyadic knots and zero integer values."""
    if level < c.max_level + 1:
        raise GridError("need level >= max coefficient level + 1")
    n = c.side * 2 ** level + 1
    out = np.zeros(n)
    for j in sorted(c.levels):
        step = 2 ** (level - j)
        half = step // 2
        profile = np.minimum(np.arange(step + 1), np.arange(step, -1, -1)) / half
        block = (-0.5) * c.levels[j][:, None] * profile[None, 1:]
        out[1:] += block.reshape(-1)
    return GridFunction(1, level, (c.corner,), out, tag="hat-synthesis")


def _lq(values, q: float) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(values.max())
    return float(np.sum(values ** q) ** (1.0 / q))


def _lp(arr, p: float) -> float:
    a = np.abs(np.asarray(arr, dtype=float))
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    return float(np.sum(a ** p) ** (1.0 / p))


def b_faber_norm(c: FaberCoeffs, s: float, p: float, q: float,
                 assembly: str = "global") -> float:
    """l_q over levels of 2^{j(s-1/p)} times the l_p of the level slice.

    ``assembly="per-interval"`` (real-line kind, p = q only) regroups the sum
    by unit intervals before the p-aggregation; algebraically identical for
    p = q, provided as a separate mode because the identity is stated only
    there.
    """
    if not (p > 0 and q > 0):
        raise GridError("p and q must lie in (0, inf]")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    if assembly == "per-interval":
        if c.kind != KIND_LINE:
            raise GridError("per-interval assembly applies to the real-line kind")
        if p != q:
            raise GridError("per-interval assembly is stated only for p = q")
        if math.isinf(p):
            parts = []
            for k in range(c.side):
                vals = [2.0 ** (j * s) * _lp(c.level(j)[k * 2 ** j:(k + 1) * 2 ** j], p)
                        for j in sorted(c.levels)]
                parts.append(max(vals) if vals else 0.0)
            return max(parts) if parts else 0.0
        total = 0.0
        for k in range(c.side):
            for j in sorted(c.levels):
                sl = c.level(j)[k * 2 ** j:(k + 1) * 2 ** j]
                total += 2.0 ** (j * (s - inv_p) * p) * float(np.sum(np.abs(sl) ** p))
        return float(total ** (1.0 / p))
    if assembly != "global":
        raise GridError(f"unknown assembly mode {assembly!r}")
    terms = [2.0 ** (j * (s - inv_p)) * _lp(c.levels[j], p) for j in sorted(c.levels)]
    return _lq(terms, q)


def f_faber_norm(c: FaberCoeffs, s: float, p: float, q: float,
                 level: int | None = None) -> float:
    """L_p over the domain of the l_q-in-levels pile of 2^{js} |d_{j,m}|.

    The integrand is constant on the half-open level-J cells, so the L_p
    integral is an exact cell sum; for p = q this reduces to the same double
    sum as the b-norm.  ``level`` only validates the evaluation grid.
    """
    if not (p > 0 and q > 0):
        raise GridError("p and q must lie in (0, inf]")
    if level is not None and level < c.max_level:
        raise GridError("evaluation level must be >= the coefficient max level")
    J = c.max_level
    ncells = c.side * 2 ** J
    if math.isinf(q):
        acc = np.zeros(ncells)
        for j in sorted(c.levels):
            vals = 2.0 ** (j * s) * np.abs(c.levels[j])
            acc = np.maximum(acc, np.repeat(vals, 2 ** (J - j)))
        pile = acc
    else:
        acc = np.zeros(ncells)
        for j in sorted(c.levels):
            vals = (2.0 ** (j * s) * np.abs(c.levels[j])) ** q
            acc = acc + np.repeat(vals, 2 ** (J - j))
        pile = acc ** (1.0 / q)
    if math.isinf(p):
        return float(pile.max()) if pile.size else 0.0
    return float((np.sum(pile ** p) * 2.0 ** -J) ** (1.0 / p))


@dataclass(frozen=True)
class HomogeneityResult:
    ratio: float
    zero_input: bool
    norm_original: float
    norm_rescaled: float


def homogeneity_ratio(f: GridFunction, j_support: int, s: float, p: float, q: float) -> HomogeneityResult:
    """Compare the rescaled norm against the scaling law lambda^{s-1/p}.

    f must live on [0,1] and vanish outside [0, 2^-j_support]; the rescale
    x -> f(2^-j x) is a pure reindexing of the samples.  Zero input reports
    ratio 1 with a flag.
    """
    if f.dim != 1:
        raise GridError("homogeneity check is one-dimensional")
    if not f.has_integer_box() or (int(round(f.corner[0])), f.side) != (0, 1):
        raise GridError("homogeneity check expects the box [0, 1]")
    L = f.level
    if not 1 <= j_support <= L - 1:
        raise GridError("support level must lie in 1..L-1")
    cut = 2 ** (L - j_support)
    tail = f.samples[cut:]
    if np.abs(tail).max(initial=0.0) > BOUNDARY_TOL:
        raise GridError(f"support violation: f is not confined to [0, 2^-{j_support}]")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    lam = 2.0 ** -j_support
    norm_f = b_faber_norm(faber_analyze(f, L - 1), s, p, q)
    g = GridFunction(1, L - j_support, (0.0,), f.samples[:cut + 1], tag=f.tag + "-rescaled")
    norm_g = b_faber_norm(faber_analyze(g, L - j_support - 1), s, p, q)
    if norm_f <= 1e-13 or norm_g <= 1e-13:
        return HomogeneityResult(1.0, True, norm_f, norm_g)
    return HomogeneityResult(norm_g / (lam ** (s - inv_p) * norm_f), False, norm_f, norm_g)
