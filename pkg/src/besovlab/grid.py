"""Dyadic grids, sampled real-valued functions, L_p quasi-norms, corpora.

Everything downstream works on closed uniform grids with spacing 2^-L over a
box: node values are stored, endpoints included, so second differences and
closed-cube suprema are exact node arithmetic.  Quadrature for L_p is the
trapezoid rule (half weights on box faces), error O(2^-L) for Lipschitz
integrands; this is deliberate and documented rather than hidden.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridError",
    "GridFunction",
    "CorpusSpec",
    "CORPUS_KINDS",
    "sample",
    "lp_norm",
    "generate_corpus",
    "grid_nodes",
]

#: norms below this are treated as zero by experiment harnesses
ZERO_TOL = 1e-13


class GridError(ValueError):
    """Invalid grid construction, parameters, or incompatible operands."""


def _as_corner(corner, dim) -> tuple[float, ...]:
    if np.isscalar(corner):
        corner = (corner,) * dim
    corner = tuple(float(c) for c in corner)
    if len(corner) != dim:
        raise GridError(f"corner has {len(corner)} components, expected {dim}")
    return corner


@dataclass(frozen=True)
class GridFunction:
    """Real function sampled on all nodes corner + m*2^-level of a box.

    ``samples`` has one axis per dimension with ``extent*2^level + 1`` nodes
    (closed grid).  Generator-made boxes have integer corner and extent; the
    difference operator produces dyadic-rational extents, which is why the
    fields are stored as floats.
    """

    dim: int
    level: int
    corner: tuple[float, ...]
    samples: np.ndarray
    tag: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise GridError("dim must be >= 1")
        if self.level < 0:
            raise GridError("level must be >= 0")
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != self.dim:
            raise GridError(f"samples have {arr.ndim} axes, expected {self.dim}")
        if any(s < 2 for s in arr.shape):
            raise GridError("need at least two nodes per axis")
        if not np.isfinite(arr).all():
            idx = tuple(int(k) for k in np.argwhere(~np.isfinite(arr))[0])
            raise GridError(f"non-finite sample at node {idx}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "corner", _as_corner(self.corner, self.dim))

    @property
    def spacing(self) -> float:
        return 2.0 ** -self.level

    @property
    def extents(self) -> tuple[float, ...]:
        """Side length per axis (dyadic rational)."""
        return tuple((s - 1) * self.spacing for s in self.samples.shape)

    @property
    def side(self) -> int:
        """Integer side length; raises if the box is not an integer cube."""
        ext = self.extents
        s = ext[0]
        if any(e != s for e in ext) or s != round(s) or s < 1:
            raise GridError(f"box {self.corner}+{ext} is not an integer cube")
        return int(round(s))

    def has_integer_box(self) -> bool:
        try:
            self.side
        except GridError:
            return False
        return all(c == round(c) for c in self.corner)

    def axis_nodes(self, axis: int) -> np.ndarray:
        n = self.samples.shape[axis]
        return self.corner[axis] + np.arange(n) * self.spacing

    def cell_values(self) -> np.ndarray:
        """Samples with the right face dropped on every axis: one value per
        half-open level-L cell, the cell carrying its lower-left node."""
        return self.samples[(slice(0, -1),) * self.dim]

    def compatible(self, other: "GridFunction") -> bool:
        return (
            self.dim == other.dim
            and self.level == other.level
            and self.corner == other.corner
            and self.samples.shape == other.samples.shape
        )

    def require_compatible(self, other: "GridFunction"):
        if not self.compatible(other):
            raise GridError("grid functions are not combinable: dim/level/box differ")

    def map(self, fn, tag: str = "") -> "GridFunction":
        """Sample-wise transform; preserves the grid."""
        return GridFunction(self.dim, self.level, self.corner, fn(self.samples),
                            tag=tag or self.tag)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self.require_compatible(other)
        return self.map(lambda s: s + other.samples)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self.require_compatible(other)
        return self.map(lambda s: s - other.samples)

    def __mul__(self, c: float) -> "GridFunction":
        return self.map(lambda s: s * float(c))

    __rmul__ = __mul__

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "dim": self.dim,
                "level": self.level,
                "box": {"corner": list(self.corner), "side": self.side},
                "samples": self.samples.ravel().tolist(),
                "tag": self.tag,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "GridFunction":
        try:
            obj = json.loads(text)
            dim = int(obj["dim"])
            level = int(obj["level"])
            corner = _as_corner(obj["box"]["corner"], dim)
            side = int(obj["box"]["side"])
            n = side * 2 ** level + 1
            arr = np.asarray(obj["samples"], dtype=float).reshape((n,) * dim)
        except (KeyError, TypeError, ValueError) as exc:
            raise GridError(f"malformed grid-function JSON: {exc}") from exc
        return GridFunction(dim, level, corner, arr, tag=str(obj.get("tag", "")))

    def to_csv(self) -> str:
        """One node per row: coordinates then value."""
        header = ",".join(f"x{a + 1}" for a in range(self.dim)) + ",value"
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        rows = [header]
        coords = np.stack([m.ravel() for m in mesh], axis=1)
        vals = self.samples.ravel()
        for c, v in zip(coords, vals):
            rows.append(",".join(repr(float(x)) for x in c) + f",{v!r}")
        return "\n".join(rows) + "\n"


def grid_nodes(level: int, box, dim: int) -> list[np.ndarray]:
    corner, side = _normalize_box(box, dim)
    n = side * 2 ** level + 1
    return [corner[a] + np.arange(n) * 2.0 ** -level for a in range(dim)]


def _normalize_box(box, dim) -> tuple[tuple[float, ...], int]:
    """Box given as (corner, side) with integer side >= 1."""
    try:
        corner, side = box
    except (TypeError, ValueError) as exc:
        raise GridError("box must be a (corner, side) pair") from exc
    side = int(side)
    if side < 1:
        raise GridError("box side must be a positive integer")
    return _as_corner(corner, dim), side


def sample(generator: Callable, level: int, box, dim: int, tag: str = "") -> GridFunction:
    """Sample a pointwise function on every node of the closed grid.

    The generator receives one array per coordinate (meshgrid for dim >= 2);
    non-vectorized callables are accepted and wrapped.
    """
    axes = grid_nodes(level, box, dim)
    mesh = np.meshgrid(*axes, indexing="ij") if dim > 1 else [axes[0]]
    try:
        vals = np.asarray(generator(*mesh), dtype=float)
        if vals.shape != mesh[0].shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.vectorize(lambda *xs: float(generator(*xs)))(*mesh)
    corner, _side = _normalize_box(box, dim)
    if not np.isfinite(vals).all():
        idx = tuple(int(k) for k in np.argwhere(~np.isfinite(np.atleast_1d(vals)))[0])
        raise GridError(f"generator returned a non-finite value at node {idx}")
    return GridFunction(dim, level, corner, vals, tag=tag)


def _face_weights(n_nodes: int, level: int) -> np.ndarray:
    w = np.full(n_nodes, 2.0 ** -level)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def lp_norm(f: GridFunction, p: float) -> float:
    """Trapezoid-weighted discrete L_p quasi-norm; p = inf is max |sample|.

    Summation is a fixed-order pairwise reduction (numpy's), so the value is
    identical regardless of thread count.
    """
    if not p > 0:
        raise GridError("p must lie in (0, inf]")
    a = np.abs(f.samples)
    if math.isinf(p):
        return float(a.max())
    if p == 2.0:
        a = a * a
    elif p != 1.0:
        a = a ** p
    w = _face_weights(f.samples.shape[0], f.level)
    for axis in range(1, f.dim):
        w = np.multiply.outer(w, _face_weights(f.samples.shape[axis], f.level))
    return float(np.sum(a * w) ** (1.0 / p))


# ---------------------------------------------------------------------------
# seeded corpora
# ---------------------------------------------------------------------------

CORPUS_KINDS = (
    "piecewise-linear-random-knots",
    "smooth-bump-sum",
    "haar-step",
    "sign-oscillating",
)

#: haar-step values are quantized to this denominator so that Haar analysis
#: and synthesis round-trip bitwise (dyadic sums are exact in binary floats)
STEP_QUANTUM = 256


@dataclass(frozen=True)
class CorpusSpec:
    """Deterministic corpus description: same spec, bit-identical corpus."""

    seed: int
    count: int
    kind: str
    amplitude: tuple[float, float] = (-1.0, 1.0)
    zero_mean: bool = False
    detail_level: int = 4

    def __post_init__(self):
        if self.count < 1:
            raise GridError("corpus count must be >= 1")
        if self.kind not in CORPUS_KINDS:
            raise GridError(f"unknown corpus kind {self.kind!r}; known: {CORPUS_KINDS}")
        lo, hi = self.amplitude
        if not lo < hi:
            raise GridError("amplitude range must satisfy lo < hi")

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "count": self.count,
                "kind": self.kind,
                "amplitude": list(self.amplitude),
                "zero_mean": self.zero_mean,
                "detail_level": self.detail_level,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "CorpusSpec":
        try:
            obj = json.loads(text)
            return CorpusSpec(
                seed=int(obj["seed"]),
                count=int(obj["count"]),
                kind=str(obj["kind"]),
                amplitude=tuple(float(a) for a in obj.get("amplitude", (-1.0, 1.0))),
                zero_mean=bool(obj.get("zero_mean", False)),
                detail_level=int(obj.get("detail_level", 4)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise GridError(f"malformed corpus spec JSON: {exc}") from exc


def _member_rng(spec: CorpusSpec, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(index,))))


def _interp_axis(values: np.ndarray, knot_nodes: np.ndarray, fine_nodes: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(values, axis, -1)
    out = np.apply_along_axis(lambda row: np.interp(fine_nodes, knot_nodes, row), -1, moved)
    return np.moveaxis(out, -1, axis)


def _pl_knot_values(rng, spec: CorpusSpec, kappa: int, box, dim: int) -> np.ndarray:
    corner, side = _normalize_box(box, dim)
    n = side * 2 ** kappa + 1
    lo, hi = spec.amplitude
    vals = rng.uniform(lo, hi, size=(n,) * dim)
    # pin every integer hyperplane to zero: unit-interval and whole-line
    # second-difference expansions both assume it
    step = 2 ** kappa
    for axis in range(dim):
        sl = [slice(None)] * dim
        sl[axis] = slice(0, None, step)
        vals[tuple(sl)] = 0.0
    if spec.zero_mean:
        interior = vals != 0.0
        if interior.any():
            vals[interior] -= vals[interior].mean()
    return vals


def _emit_piecewise_linear(rng, spec, level, box, dim) -> np.ndarray:
    kappa = min(spec.detail_level, level)
    vals = _pl_knot_values(rng, spec, kappa, box, dim)
    corner, side = _normalize_box(box, dim)
    knots = corner[0] + np.arange(side * 2 ** kappa + 1) * 2.0 ** -kappa
    fine = corner[0] + np.arange(side * 2 ** level + 1) * 2.0 ** -level
    out = vals
    for axis in range(dim):
        knots_a = corner[axis] + np.arange(side * 2 ** kappa + 1) * 2.0 ** -kappa
        fine_a = corner[axis] + np.arange(side * 2 ** level + 1) * 2.0 ** -level
        out = _interp_axis(out, knots_a, fine_a, axis)
    return out


def _emit_bump_sum(rng, spec, level, box, dim) -> np.ndarray:
    corner, side = _normalize_box(box, dim)
    axes = grid_nodes(level, (corner, side), dim)
    mesh = np.meshgrid(*axes, indexing="ij") if dim > 1 else [axes[0]]
    lo, hi = spec.amplitude
    scale = 0.5 * (hi - lo)
    out = np.zeros(mesh[0].shape)
    for _ in range(3):
        amp = rng.uniform(0.25, 1.0) * scale * rng.choice([-1.0, 1.0])
        term = np.full_like(out, amp)
        for axis in range(dim):
            freq = int(rng.integers(1, 4))
            term = term * np.sin(np.pi * freq * mesh[axis])
        out += term
    return out


def _emit_haar_step(rng, spec, level, box, dim) -> np.ndarray:
    kappa = min(spec.detail_level, level)
    corner, side = _normalize_box(box, dim)
    lo, hi = spec.amplitude
    klo, khi = round(lo * STEP_QUANTUM), round(hi * STEP_QUANTUM)
    cells = rng.integers(klo, khi + 1, size=(side * 2 ** kappa,) * dim).astype(float)
    if spec.zero_mean:
        cells -= np.round(cells.mean())
    cells /= STEP_QUANTUM
    for axis in range(dim):
        cells = np.repeat(cells, 2 ** (level - kappa), axis=axis)
    n = side * 2 ** level + 1
    out = np.zeros((n,) * dim)
    out[(slice(0, -1),) * dim] = cells
    return out


def _emit_sawtooth(rng, spec, level, box, dim) -> np.ndarray:
    kappa = min(spec.detail_level, level)
    corner, side = _normalize_box(box, dim)
    lo, hi = spec.amplitude
    scale = 0.5 * (hi - lo)
    k = 2 ** (level - kappa)
    tent = np.minimum(np.arange(k + 1), np.arange(k, -1, -1)) / max(k / 2.0, 1.0)

    def one_axis():
        teeth = side * 2 ** kappa
        mags = rng.uniform(0.25, 1.0, size=teeth) * scale
        signs = (-1.0) ** np.arange(teeth)
        n = side * 2 ** level + 1
        v = np.zeros(n)
        for m in range(teeth):
            v[m * k:(m + 1) * k + 1] = mags[m] * signs[m] * tent
        return v

    out = one_axis()
    for _ in range(dim - 1):
        out = np.multiply.outer(out, one_axis())
    return out


_EMITTERS = {
    "piecewise-linear-random-knots": _emit_piecewise_linear,
    "smooth-bump-sum": _emit_bump_sum,
    "haar-step": _emit_haar_step,
    "sign-oscillating": _emit_sawtooth,
}


def generate_corpus(spec: CorpusSpec, level: int, box, dim: int) -> list[GridFunction]:
    """Deterministic corpus: member i is seeded by (spec.seed, i) only."""
    corner, side = _normalize_box(box, dim)
    if spec.detail_level > level:
        raise GridError("detail_level must not exceed the sampling level")
    emit = _EMITTERS[spec.kind]
    out = []
    for i in range(spec.count):
        rng = _member_rng(spec, i)
        arr = emit(rng, spec, level, (corner, side), dim)
        out.append(GridFunction(dim, level, corner, arr, tag=f"{spec.kind}#{i}"))
    return out
