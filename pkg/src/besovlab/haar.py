"""Tensor Haar system on dyadic cubes and its weighted sequence quasi-norm.

The two one-dimensional factors are the unit-interval step pair: the mean
factor (F, the indicator of [0,1)) and the oscillation factor (M, +1 on
[0,1/2), -1 on [1/2,1)).  Node values follow the half-open convention: a
node carries the cell to its right, so step functions sampled at lower-left
corners are analyzed exactly.

A basis member at level j is indexed by (j, G, m): G is a word over {F, M}
of length dim, with at least one M required for j >= 1, and m the cube index.
Coefficients of a step function are exact finite sums of cell values; the
sequence quasi-norm aggregates level slices with weight 2^{j(s - n/p)}.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridError, GridFunction

__all__ = [
    "HaarCoeffs",
    "valid_words",
    "haar_eval",
    "analyze",
    "synthesize",
    "b_sequence_norm",
    "haar_counterexample",
]


def valid_words(dim: int, j: int) -> tuple[str, ...]:
    """Admissible F/M words at level j: all words at j = 0, at least one M after."""
    words = ["".join(w) for w in itertools.product("FM", repeat=dim)]
    if j >= 1:
        words = [w for w in words if "M" in w]
    return tuple(words)


def _factor(letter: str, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if letter == "F":
        return ((y >= 0.0) & (y < 1.0)).astype(float)
    if letter == "M":
        return np.where((y >= 0.0) & (y < 0.5), 1.0, np.where((y >= 0.5) & (y < 1.0), -1.0, 0.0))
    raise GridError(f"unknown Haar factor {letter!r}")


def haar_eval(j: int, word: str, m, x):
    """Pointwise value of the level-j basis member: the product over axes of
    the chosen factor at 2^j x_l - m_l.  Values lie in {-1, 0, +1}."""
    dim = len(word)
    if j >= 1 and "M" not in word:
        raise GridError("levels >= 1 need at least one M factor")
    if dim == 1:
        mm = (m,) if np.isscalar(m) else tuple(m)
        return _factor(word[0], (2.0 ** j) * np.asarray(x, float) - mm[0])
    x = np.asarray(x, dtype=float)
    mm = tuple(m)
    if len(mm) != dim:
        raise GridError("index m must have one component per axis")
    out = 1.0
    for axis, letter in enumerate(word):
        out = out * _factor(letter, (2.0 ** j) * x[..., axis] - mm[axis])
    return out


class HaarCoeffs:
    """Level-sparse coefficient set: dense per-level arrays inside the box.

    ``levels[j][word]`` is an array over cube indices relative to the box
    corner (offset corner*2^j per axis); anything absent is zero.
    """

    def __init__(self, dim: int, max_level: int, corner, side: int, levels=None):
        self.dim = int(dim)
        self.max_level = int(max_level)
        self.corner = tuple(int(c) for c in (corner if not np.isscalar(corner) else (corner,) * dim))
        self.side = int(side)
        self.levels: dict[int, dict[str, np.ndarray]] = {}
        if levels:
            for j, per_word in levels.items():
                for word, arr in per_word.items():
                    self.set_level(int(j), word, arr)

    def level_shape(self, j: int) -> tuple[int, ...]:
        return (self.side * 2 ** j,) * self.dim

    def set_level(self, j: int, word: str, arr):
        if not 0 <= j <= self.max_level:
            raise GridError(f"level {j} outside 0..{self.max_level}")
        if word not in valid_words(self.dim, j):
            raise GridError(f"word {word!r} invalid at level {j}")
        arr = np.asarray(arr, dtype=float)
        if arr.shape != self.level_shape(j):
            raise GridError(f"level-{j} array must have shape {self.level_shape(j)}")
        self.levels.setdefault(j, {})[word] = arr

    def value(self, j: int, word: str, m) -> float:
        mm = (m,) if np.isscalar(m) else tuple(m)
        per_word = self.levels.get(j, {})
        if word not in per_word:
            return 0.0
        idx = tuple(int(mi) - c * 2 ** j for mi, c in zip(mm, self.corner))
        return float(per_word[word][idx])

    def entries(self):
        """Yield (j, word, m, value) over stored nonzero entries."""
        for j in sorted(self.levels):
            for word, arr in sorted(self.levels[j].items()):
                for idx in np.argwhere(arr != 0.0):
                    m = tuple(int(i) + c * 2 ** j for i, c in zip(idx, self.corner))
                    yield j, word, m, float(arr[tuple(idx)])

    def to_json(self) -> str:
        ents = [
            {"j": j, "G": word, "m": list(m), "value": v}
            for j, word, m, v in self.entries()
        ]
        return json.dumps(
            {"n": self.dim, "J": self.max_level,
             "box": {"corner": list(self.corner), "side": self.side},
             "entries": ents},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "HaarCoeffs":
        obj = json.loads(text)
        out = HaarCoeffs(int(obj["n"]), int(obj["J"]),
                         obj["box"]["corner"], int(obj["box"]["side"]))
        for e in obj["entries"]:
            j, word = int(e["j"]), str(e["G"])
            if word not in out.levels.get(j, {}):
                out.set_level(j, word, np.zeros(out.level_shape(j)))
            idx = tuple(int(mi) - c * 2 ** j for mi, c in zip(e["m"], out.corner))
            out.levels[j][word][idx] = float(e["value"])
        return out


def _combine_children(src: np.ndarray, word: str) -> np.ndarray:
    """Collapse the per-axis child pairs of a level-(j+1) array: F sums the
    pair, M takes first minus second (the factor is +1 then -1)."""
    out = src
    for axis, letter in enumerate(word):
        shape = out.shape[:axis] + (out.shape[axis] // 2, 2) + out.shape[axis + 1:]
        out = out.reshape(shape)
        first = np.take(out, 0, axis=axis + 1)
        second = np.take(out, 1, axis=axis + 1)
        out = first + second if letter == "F" else first - second
    return out


def _expand_children(arr: np.ndarray, word: str) -> np.ndarray:
    """Adjoint of _combine_children: scatter a level-j array onto level-(j+1)
    children with the factor's signs."""
    out = arr
    for axis, letter in enumerate(word):
        second = out if letter == "F" else -out
        stacked = np.stack([out, second], axis=axis + 1)
        shape = out.shape[:axis] + (2 * out.shape[axis],) + out.shape[axis + 1:]
        out = stacked.reshape(shape)
    return out


def analyze(f: GridFunction, max_level: int) -> HaarCoeffs:
    """Exact coefficients of a function constant on level-L cells.

    The cell value is the sample at the cell's lower-left node.  Inner
    products are finite sums of cell integrals, scaled by 2^{j n}; no
    quadrature error enters.  max_level > L is rejected.
    """
    if not f.has_integer_box():
        raise GridError("Haar analysis needs an integer box")
    L, n = f.level, f.dim
    if max_level > L:
        raise GridError(f"max_level {max_level} exceeds grid level {L}")
    if max_level < 0:
        raise GridError("max_level must be >= 0")
    side = f.side
    corner = tuple(int(round(c)) for c in f.corner)
    out = HaarCoeffs(n, max_level, corner, side)

    # cell integrals per level, finest first: children halve exactly
    integrals: dict[int, np.ndarray] = {L: f.cell_values() * 2.0 ** (-L * n)}
    finest = L + 1
    if max_level >= L:
        child = integrals[L] * 2.0 ** -n
        for axis in range(n):
            child = np.repeat(child, 2, axis=axis)
        integrals[L + 1] = child
    for j in range(L - 1, -1, -1):
        integrals[j] = _combine_children(integrals[j + 1], "F" * n)

    for j in range(0, max_level + 1):
        src = integrals[j + 1]
        for word in valid_words(n, j):
            lam = 2.0 ** (j * n) * _combine_children(src, word)
            out.set_level(j, word, lam)
    return out


def synthesize(c: HaarCoeffs, level: int) -> GridFunction:
    """Pointwise finite sum of the stored series at cell representatives.

    Values live on level-``level`` cells (placed at lower-left nodes); box
    right-face nodes get 0, every half-open support ends before them.
    """
    if level < c.max_level:
        raise GridError("synthesis level must be >= the coefficient max level")
    n, side = c.dim, c.side
    acc = np.zeros((side,) * n)
    for j in range(0, c.max_level + 1):
        acc = _expand_children(acc, "F" * n)  # carry coarser content down
        for word, lam in sorted(c.levels.get(j, {}).items()):
            acc = acc + _expand_children(lam, word)
    depth = c.max_level + 1  # acc now lives on level-(J+1) cells
    if level >= depth:
        for axis in range(n):
            acc = np.repeat(acc, 2 ** (level - depth), axis=axis)
    else:  # level == J: keep the lower-left representative of each cell
        acc = acc[(slice(0, None, 2),) * n]
    nn = side * 2 ** level + 1
    samples = np.zeros((nn,) * n)
    samples[(slice(0, -1),) * n] = acc
    return GridFunction(n, level, c.corner, samples, tag="haar-synthesis")


def _lq(values: np.ndarray, q: float) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(values.max())
    return float(np.sum(values ** q) ** (1.0 / q))


def _level_lp(arr: np.ndarray, p: float) -> float:
    a = np.abs(arr)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a ** p) ** (1.0 / p))


def b_sequence_norm(c: HaarCoeffs, s: float, p: float, q: float) -> float:
    """Weighted sequence quasi-norm of the coefficient set.

    Per level j and word G the inner block is the l_p size of the cube
    slice; blocks are l_q-aggregated with weight 2^{j(s - n/p)}, sup
    modifications at p or q = inf.
    """
    if not (p > 0 and q > 0):
        raise GridError("p and q must lie in (0, inf]")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    terms = []
    for j in sorted(c.levels):
        w = 2.0 ** (j * (s - c.dim * inv_p))
        for word in sorted(c.levels[j]):
            terms.append(w * _level_lp(c.levels[j][word], p))
    return _lq(np.asarray(terms), q)


def haar_counterexample(j: int, dim: int, level: int) -> GridFunction:
    """Sum of all purely oscillating level-j members over the unit cube.

    A step function with values +-1 on level-(j+1) cells inside [0,1)^n and
    0 outside; its absolute value is the unit-cube indicator on cells.  The
    sequence norm of the pair separates by the factor 2^{js}.
    """
    if level < j + 1:
        raise GridError("need level >= j + 1 to resolve the steps")
    if j < 0:
        raise GridError("j must be >= 0")
    sign_1d = (-1.0) ** np.arange(2 ** (j + 1))
    cells = sign_1d
    for _ in range(dim - 1):
        cells = np.multiply.outer(cells, sign_1d)
    for axis in range(dim):
        cells = np.repeat(cells, 2 ** (level - j - 1), axis=axis)
    n = 2 ** level + 1
    samples = np.zeros((n,) * dim)
    samples[(slice(0, -1),) * dim] = cells
    return GridFunction(dim, level, (0,) * dim, samples, tag=f"haar-alt j={j}")
