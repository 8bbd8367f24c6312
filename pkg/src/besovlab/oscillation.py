"""Closed-cube oscillation brackets and the bracket-based B/F norms.

The bracket of f over a dyadic cube is sup f - inf f taken over the closed
cube's sample set, so neighbouring cubes share their corner samples; the
companion array keeps min |f| per cube.  Sharing the corners is what makes
the two-sided truncation inequality

    [|f|] <= [f] <= 2 [|f|] + 2 min|f|

exact on every cube.  Norms aggregate 2^{j(s-n/p)}-weighted bracket slices
over levels 0..L (B form) or pile the levels pointwise before the L_p
integral (F form); the F integrand is constant on level-L cells and is
integrated by exact cell sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridError, GridFunction, lp_norm

__all__ = [
    "OscArray",
    "osc_brackets",
    "osc_poly",
    "b_osc_norm",
    "f_osc_norm",
    "osc_tail_gap",
]


def _closed_reduce(a: np.ndarray, k: int, op) -> np.ndarray:
    """Reduce overlapping windows [m*k, (m+1)*k] (endpoints shared) along
    every axis with np.maximum or np.minimum."""
    out = a
    for axis in range(a.ndim):
        m = np.moveaxis(out, axis, 0)
        nb = (m.shape[0] - 1) // k
        core = op.reduce(m[:-1].reshape(nb, k, *m.shape[1:]), axis=1)
        edge = m[k::k]
        out = np.moveaxis(op(core, edge), 0, axis)
    return out


@dataclass(frozen=True)
class OscArray:
    """Per-cube brackets and min |f| at one level, indexed from the box corner."""

    level: int
    corner: tuple[float, ...]
    brackets: np.ndarray
    min_abs: np.ndarray

    def __post_init__(self):
        if (self.brackets < 0).any():
            raise GridError("brackets must be nonnegative")

    def to_csv(self) -> str:
        dim = self.brackets.ndim
        header = "j," + ",".join(f"m{a + 1}" for a in range(dim)) + ",bracket,min_abs"
        rows = [header]
        for idx in np.ndindex(self.brackets.shape):
            m = ",".join(str(int(i + c * 2 ** self.level))
                         for i, c in zip(idx, self.corner))
            rows.append(f"{self.level},{m},{self.brackets[idx]!r},{self.min_abs[idx]!r}")
        return "\n".join(rows) + "\n"


def osc_brackets(f: GridFunction, j: int) -> OscArray:
    """sup - inf of f over every closed level-j cube meeting the box."""
    if not 0 <= j <= f.level:
        raise GridError(f"cube level must lie in 0..{f.level}")
    k = 2 ** (f.level - j)
    mx = _closed_reduce(f.samples, k, np.maximum)
    mn = _closed_reduce(f.samples, k, np.minimum)
    mabs = _closed_reduce(np.abs(f.samples), k, np.minimum)
    return OscArray(j, f.corner, mx - mn, mabs)


def _windows_1d(a: np.ndarray, k: int) -> np.ndarray:
    nb = (a.shape[0] - 1) // k
    return np.concatenate([a[:-1].reshape(nb, k), a[k::k, None]], axis=1)


def osc_poly(f: GridFunction, order: int, u: float, j: int) -> np.ndarray:
    """Per-cube best constant/affine approximation error.

    u = inf with order 0 is half the bracket (the midrange is optimal);
    u = 2 is the uniform-weight least-squares RMS residual of the degree-
    ``order`` fit over the closed cube samples.
    """
    if math.isinf(u):
        if order != 0:
            raise GridError("sup-norm oscillation supports order 0 only")
        return osc_brackets(f, j).brackets * 0.5
    if u != 2.0 or order not in (0, 1):
        raise GridError("supported oscillations: (order 0, u inf) and (order 0 or 1, u 2)")
    k = 2 ** (f.level - j)
    if f.dim == 1:
        w = _windows_1d(f.samples, k)                      # (cubes, k+1)
        mean = w.mean(axis=1)
        var = (w * w).mean(axis=1) - mean * mean
        if order == 1:
            xc = np.arange(k + 1) - k / 2.0
            vx = float((xc * xc).mean())
            cov = (w * xc).mean(axis=1)
            var = var - cov * cov / vx
        return np.sqrt(np.maximum(var, 0.0))
    if f.dim != 2:
        raise GridError("least-squares oscillation implemented for dimensions 1 and 2")
    a = f.samples
    nb0 = (a.shape[0] - 1) // k
    nb1 = (a.shape[1] - 1) // k
    w = np.concatenate([a[:-1].reshape(nb0, k, a.shape[1]),
                        a[k::k][:, None, :]], axis=1)       # (nb0, k+1, N1)
    w = np.concatenate([w[:, :, :-1].reshape(nb0, k + 1, nb1, k),
                        w[:, :, k::k][:, :, :, None]], axis=3)
    w = w.transpose(0, 2, 1, 3)                            # (nb0, nb1, k+1, k+1)
    flat = w.reshape(nb0, nb1, -1)
    mean = flat.mean(axis=2)
    var = (flat * flat).mean(axis=2) - mean * mean
    if order == 1:
        xc = np.arange(k + 1) - k / 2.0
        vx = float((xc * xc).mean())
        # centered axis designs are orthogonal on the product grid, so the
        # affine fit subtracts each axis term independently
        cov0 = (w * xc[None, None, :, None]).mean(axis=(2, 3))
        cov1 = (w * xc[None, None, None, :]).mean(axis=(2, 3))
        var = var - cov0 * cov0 / vx - cov1 * cov1 / vx
    return np.sqrt(np.maximum(var, 0.0))


def _lq(values, q: float) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(values.max())
    return float(np.sum(values ** q) ** (1.0 / q))


def _lp_flat(arr: np.ndarray, p: float) -> float:
    a = np.abs(arr).ravel()
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a ** p) ** (1.0 / p))


def b_osc_norm(f: GridFunction, s: float, p: float, q: float,
               max_level: int | None = None) -> float:
    """L_p norm of f plus the l_q-over-levels of weighted bracket slices."""
    if not (p > 0 and q > 0):
        raise GridError("p and q must lie in (0, inf]")
    J = f.level if max_level is None else max_level
    if not 0 <= J <= f.level:
        raise GridError("max_level out of range")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    terms = []
    for j in range(0, J + 1):
        br = osc_brackets(f, j).brackets
        terms.append(2.0 ** (j * (s - f.dim * inv_p)) * _lp_flat(br, p))
    return lp_norm(f, p) + _lq(terms, q)


def f_osc_norm(f: GridFunction, s: float, p: float, q: float,
               max_level: int | None = None) -> float:
    """L_p norm of f plus the L_p integral of the pointwise level pile
    (sum_j 2^{jsq} [f]_{j,m_j(x)}^q)^{1/q}; exact cell-sum integration."""
    if not (p > 0 and q > 0):
        raise GridError("p and q must lie in (0, inf]")
    J = f.level if max_level is None else max_level
    if not 0 <= J <= f.level:
        raise GridError("max_level out of range")
    n, L = f.dim, f.level
    cells = tuple(s - 1 for s in f.samples.shape)
    if math.isinf(q):
        acc = np.zeros(cells)
        for j in range(0, J + 1):
            br = 2.0 ** (j * s) * osc_brackets(f, j).brackets
            for axis in range(n):
                br = np.repeat(br, 2 ** (L - j), axis=axis)
            acc = np.maximum(acc, br)
        pile = acc
    else:
        acc = np.zeros(cells)
        for j in range(0, J + 1):
            br = (2.0 ** (j * s) * osc_brackets(f, j).brackets) ** q
            for axis in range(n):
                br = np.repeat(br, 2 ** (L - j), axis=axis)
            acc = acc + br
        pile = acc ** (1.0 / q)
    if math.isinf(p):
        bracket_part = float(pile.max()) if pile.size else 0.0
    else:
        bracket_part = float((np.sum(pile ** p) * 2.0 ** (-L * n)) ** (1.0 / p))
    return lp_norm(f, p) + bracket_part


def osc_tail_gap(f: GridFunction, s: float, p: float, q: float,
                 kind: str = "b") -> float:
    """Level-truncation diagnostic: change of the norm when the deepest
    cube level is dropped."""
    fn = b_osc_norm if kind == "b" else f_osc_norm
    full = fn(f, s, p, q, max_level=f.level)
    trimmed = fn(f, s, p, q, max_level=max(f.level - 1, 0))
    return abs(full - trimmed)
