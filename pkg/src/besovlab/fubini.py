"""Axis-slice decomposition and the slice-norm cross-check for n >= 2.

The n-dimensional discrete norm is compared against the sum over axes of
the outer L_p (over the complementary node lattice, trapezoid weights) of
the one-dimensional slice norms.  For the B scale this equivalence holds
precisely when p = q, so the harness rejects p != q with that citation.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import GridError, GridFunction, ZERO_TOL
from .faber import b_faber_norm, faber_analyze
from .oscillation import b_osc_norm

__all__ = ["FubiniPreconditionError", "slices", "fubini_norm", "fubini_compare"]

SLICE_NORMS = ("osc-b", "faber-b")


class FubiniPreconditionError(GridError):
    """Parameter point outside the slice-equivalence window."""

    def __init__(self, message: str, citation: str):
        super().__init__(f"{message} [{citation}]")
        self.citation = citation


def slices(f: GridFunction, axis: int) -> list[GridFunction]:
    """One 1-d function per node of the complementary lattice, sharing the
    level and the box extent along the sliced axis."""
    if f.dim < 2:
        raise GridError("slicing needs dimension >= 2")
    if not 0 <= axis < f.dim:
        raise GridError("axis out of range")
    moved = np.moveaxis(f.samples, axis, -1)
    flat = moved.reshape(-1, moved.shape[-1])
    return [GridFunction(1, f.level, (f.corner[axis],), row, tag=f"{f.tag}|ax{axis}#{i}")
            for i, row in enumerate(flat)]


def _outer_lp(values: np.ndarray, shape: tuple[int, ...], level: int, p: float) -> float:
    """Trapezoid L_p of per-slice values over the complementary lattice."""
    vals = np.abs(values.reshape(shape))
    if math.isinf(p):
        return float(vals.max())
    w = None
    for n_nodes in shape:
        wa = np.full(n_nodes, 2.0 ** -level)
        wa[0] *= 0.5
        wa[-1] *= 0.5
        w = wa if w is None else np.multiply.outer(w, wa)
    return float(np.sum(vals ** p * w) ** (1.0 / p))


def _slice_norm(g: GridFunction, sp, norm1d: str) -> float:
    if norm1d == "osc-b":
        return b_osc_norm(g, sp.s, sp.p, sp.q)
    if norm1d == "faber-b":
        return b_faber_norm(faber_analyze(g, g.level - 1, "real-line-compact"),
                            sp.s, sp.p, sp.q)
    raise GridError(f"slice norm must be one of {SLICE_NORMS}")


def fubini_norm(f: GridFunction, sp, norm1d: str = "osc-b") -> float:
    """Sum over axes of the outer L_p of the 1-d slice norms (p = q only)."""
    if f.dim < 2:
        raise GridError("slice cross-check needs dimension >= 2")
    if sp.n != f.dim:
        raise GridError("space dimension does not match the function")
    if sp.p != sp.q:
        raise FubiniPreconditionError(
            "the B-scale slice equivalence requires p = q", "Prop2.5(ii)")
    total = 0.0
    for axis in range(f.dim):
        per_slice = np.array([_slice_norm(g, sp, norm1d) for g in slices(f, axis)])
        comp_shape = tuple(n for a, n in enumerate(f.samples.shape) if a != axis)
        total += _outer_lp(per_slice, comp_shape, f.level, sp.p)
    return total


def fubini_compare(f: GridFunction, sp, norm1d: str = "osc-b") -> dict:
    """Slice-assembled norm over the direct n-dimensional bracket norm."""
    direct = b_osc_norm(f, sp.s, sp.p, sp.q)
    assembled = fubini_norm(f, sp, norm1d)
    if direct <= ZERO_TOL:
        return {"direct": direct, "assembled": assembled, "ratio": None}
    return {"direct": direct, "assembled": assembled, "ratio": assembled / direct}
