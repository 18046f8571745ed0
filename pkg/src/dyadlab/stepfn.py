"""Exact algebra of compactly supported dyadic step functions.

A :class:`StepFunction` is constant on half-open dyadic cells of side
``2^resolution`` and zero outside its box.  All cell boundaries are dyadic
rationals, so refinement, products, translation by cell multiples, integrals
and norms incur no quadrature error: results are exact whenever the value
arithmetic itself is exact.

Values live in dense NumPy arrays (1-D or 2-D); the zero extension outside the
box is implicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RefinementBudgetError
from .lattice import DyadicInterval, HaarFunction, Window, _as_point

#: Maximum number of one-level refinements used to snap translation amounts.
TRANSLATE_REFINE_BUDGET = 8


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on the dyadic grid at scale ``resolution``.

    ``lo``/``hi`` give the box ``Prod_i [lo_i 2^r, hi_i 2^r)`` in cell units;
    ``values`` holds one scalar per cell (axis order matches coordinate order).
    """

    resolution: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.lo, tuple):
            object.__setattr__(self, "lo", tuple(self.lo))
        if not isinstance(self.hi, tuple):
            object.__setattr__(self, "hi", tuple(self.hi))
        d = len(self.lo)
        if not 1 <= d <= 2 or len(self.hi) != d:
            raise ValueError("box must have 1 or 2 matching axis bounds")
        shape = tuple(h - l for l, h in zip(self.lo, self.hi))
        if any(s <= 0 for s in shape):
            raise ValueError("box must have positive width on every axis")
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != shape:
            raise ValueError(f"values shape {vals.shape} does not match box {shape}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # ------------------------------------------------------------------ basics

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def cell_side(self) -> float:
        return 2.0 ** self.resolution

    @property
    def cell_measure(self) -> float:
        return 2.0 ** (self.resolution * self.d)

    def box_lower(self) -> tuple[float, ...]:
        return tuple(l * self.cell_side for l in self.lo)

    def box_upper(self) -> tuple[float, ...]:
        return tuple(h * self.cell_side for h in self.hi)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    # ------------------------------------------------------------ constructors

    @classmethod
    def zero(cls, resolution: int, lo: Sequence[int], hi: Sequence[int]) -> StepFunction:
        lo, hi = tuple(lo), tuple(hi)
        return cls(resolution, lo, hi, np.zeros(tuple(h - l for l, h in zip(lo, hi))))

    @classmethod
    def zero_like(cls, other: StepFunction) -> StepFunction:
        return cls.zero(other.resolution, other.lo, other.hi)

    @classmethod
    def on_window(cls, window: Window, resolution: int, values: np.ndarray) -> StepFunction:
        if resolution > window.scale:
            raise ValueError("resolution must be at least as fine as the window scale")
        shift = window.scale - resolution
        lo = tuple(l << shift for l in window.lo)
        hi = tuple(h << shift for h in window.hi)
        return cls(resolution, lo, hi, values)

    @classmethod
    def indicator(cls, interval: DyadicInterval, resolution: int | None = None) -> StepFunction:
        """The characteristic function 1_I, optionally at a finer resolution."""
        r = interval.scale if resolution is None else resolution
        if r > interval.scale:
            raise ValueError("resolution coarser than the interval")
        shift = interval.scale - r
        lo = tuple(m << shift for m in interval.index)
        hi = tuple((m + 1) << shift for m in interval.index)
        return cls(r, lo, hi, np.ones(tuple(h - l for l, h in zip(lo, hi))))

    @classmethod
    def haar(cls, h: HaarFunction, resolution: int | None = None) -> StepFunction:
        """The Haar function h_I as a step function (resolution >= one level down)."""
        r = h.interval.scale - 1 if resolution is None else resolution
        if r > h.interval.scale - 1:
            raise ValueError("Haar functions need at least child resolution")
        out = cls.indicator(h.interval, r)
        vals = np.array(out.values)
        children = h.interval.children()
        for coeff, child in zip(h.coeffs, children):
            shift = child.scale - r
            sel = tuple(
                slice((m << shift) - l, ((m + 1) << shift) - l)
                for m, l in zip(child.index, out.lo)
            )
            vals[sel] = coeff
        return cls(r, out.lo, out.hi, vals)

    @classmethod
    def from_json(cls, obj: dict) -> StepFunction:
        window = obj["window"]
        lo = tuple(int(i) for i in window["lo"])
        hi = tuple(int(i) for i in window["hi"])
        values = np.array(obj["values"], dtype=np.float64)
        return cls(int(obj["k_min"]), lo, hi, values.reshape(tuple(h - l for l, h in zip(lo, hi))))

    def to_json(self) -> dict:
        return {
            "k_min": self.resolution,
            "window": {"lo": list(self.lo), "hi": list(self.hi)},
            "values": self.values.reshape(-1).tolist(),
        }

    # ------------------------------------------------------------ re-gridding

    def refine(self, resolution: int) -> StepFunction:
        """Re-grid to a finer resolution (values repeat; exact)."""
        if resolution > self.resolution:
            raise ValueError("refine() only moves to finer resolutions")
        if resolution == self.resolution:
            return self
        factor = 1 << (self.resolution - resolution)
        vals = self.values
        for axis in range(self.d):
            vals = np.repeat(vals, factor, axis=axis)
        lo = tuple(l * factor for l in self.lo)
        hi = tuple(h * factor for h in self.hi)
        return StepFunction(resolution, lo, hi, vals)

    def embed(self, lo: Sequence[int], hi: Sequence[int]) -> StepFunction:
        """Zero-pad onto a larger box (same resolution)."""
        lo, hi = tuple(lo), tuple(hi)
        if any(l > sl or h < sh for l, h, sl, sh in zip(lo, hi, self.lo, self.hi)):
            raise ValueError("embedding box must contain the current box")
        out = np.zeros(tuple(h - l for l, h in zip(lo, hi)))
        sel = tuple(slice(sl - l, sh - l) for l, sl, sh in zip(lo, self.lo, self.hi))
        out[sel] = self.values
        return StepFunction(self.resolution, lo, hi, out)

    @staticmethod
    def _common(f: StepFunction, g: StepFunction, box: str) -> tuple[StepFunction, StepFunction]:
        if f.d != g.d:
            raise ValueError("dimension mismatch")
        r = min(f.resolution, g.resolution)
        f, g = f.refine(r), g.refine(r)
        if box == "union":
            lo = tuple(min(a, b) for a, b in zip(f.lo, g.lo))
            hi = tuple(max(a, b) for a, b in zip(f.hi, g.hi))
            return f.embed(lo, hi), g.embed(lo, hi)
        lo = tuple(max(a, b) for a, b in zip(f.lo, g.lo))
        hi = tuple(min(a, b) for a, b in zip(f.hi, g.hi))
        if any(l >= h for l, h in zip(lo, hi)):
            return None, None  # type: ignore[return-value]  # disjoint supports
        fs = tuple(slice(l - a, h - a) for l, h, a in zip(lo, hi, f.lo))
        gs = tuple(slice(l - a, h - a) for l, h, a in zip(lo, hi, g.lo))
        return (
            StepFunction(r, lo, hi, f.values[fs]),
            StepFunction(r, lo, hi, g.values[gs]),
        )

    # ---------------------------------------------------------------- algebra

    def __add__(self, other: StepFunction) -> StepFunction:
        f, g = self._common(self, other, "union")
        return StepFunction(f.resolution, f.lo, f.hi, f.values + g.values)

    def __sub__(self, other: StepFunction) -> StepFunction:
        f, g = self._common(self, other, "union")
        return StepFunction(f.resolution, f.lo, f.hi, f.values - g.values)

    def __neg__(self) -> StepFunction:
        return StepFunction(self.resolution, self.lo, self.hi, -self.values)

    def scale_by(self, c: float) -> StepFunction:
        return StepFunction(self.resolution, self.lo, self.hi, c * self.values)

    def __mul__(self, other: StepFunction | float) -> StepFunction:
        if isinstance(other, (int, float)):
            return self.scale_by(float(other))
        f, g = self._common(self, other, "intersection")
        if f is None:  # disjoint supports: the product is identically zero
            r = min(self.resolution, other.resolution)
            return StepFunction.zero(r, (0,) * self.d, (1,) * self.d)
        return StepFunction(f.resolution, f.lo, f.hi, f.values * g.values)

    __rmul__ = __mul__

    def abs(self) -> StepFunction:
        return StepFunction(self.resolution, self.lo, self.hi, np.abs(self.values))

    def power(self, q: float, zero_to_zero: bool = True) -> StepFunction:
        """Pointwise power with the 0^0 = 0 convention (kept on the zero set)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.power(self.values, q)
        if zero_to_zero:
            vals = np.where(self.values == 0.0, 0.0, vals)
        return StepFunction(self.resolution, self.lo, self.hi, vals)

    # ------------------------------------------------------------- evaluation

    def evaluate(self, x: float | Sequence[float]) -> float:
        pt = _as_point(x, self.d)
        idx = []
        for c, l, h in zip(pt, self.lo, self.hi):
            i = math.floor(c / self.cell_side)
            if not l <= i < h:
                return 0.0
            idx.append(i - l)
        return float(self.values[tuple(idx)])

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; ``points`` has shape (n,) in d=1 or (n, 2)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64).reshape(-1, self.d))
        idx = np.floor(pts / self.cell_side).astype(np.int64)
        ok = np.ones(len(pts), dtype=bool)
        for axis in range(self.d):
            ok &= (idx[:, axis] >= self.lo[axis]) & (idx[:, axis] < self.hi[axis])
        out = np.zeros(len(pts))
        sel = tuple(idx[ok, axis] - self.lo[axis] for axis in range(self.d))
        out[ok] = self.values[sel]
        return out

    # -------------------------------------------------------------- integrals

    def integral(self) -> float:
        return float(self.values.sum()) * self.cell_measure

    def lp_norm(self, p: float) -> float:
        """(integral |f|^p)^{1/p}; requires p > 0."""
        if p <= 0:
            raise ValueError("p must be positive")
        total = float(np.abs(self.values).__pow__(p).sum()) * self.cell_measure
        return total ** (1.0 / p)

    def inner(self, other: StepFunction) -> float:
        """The exact pairing integral f*g."""
        f, g = self._common(self, other, "intersection")
        if f is None:
            return 0.0
        return float((f.values * g.values).sum()) * f.cell_measure

    def equals(self, other: StepFunction) -> bool:
        """Exact equality as functions (common refinement, union box)."""
        f, g = self._common(self, other, "union")
        return bool(np.array_equal(f.values, g.values))

    def max_abs_difference(self, other: StepFunction) -> float:
        f, g = self._common(self, other, "union")
        return float(np.max(np.abs(f.values - g.values)))

    # ------------------------------------------------------------ translation

    def translate(self, t: float | Sequence[float]) -> StepFunction:
        """g(x) = f(x + t); t is snapped by refining at most 8 levels.

        Positive t moves the graph left.  Each snap attempt refines one level;
        amounts that never become integer cell multiples (e.g. 1/3) raise
        :class:`RefinementBudgetError`.
        """
        tv = _as_point(t, self.d) if not isinstance(t, (int, float)) else (float(t),) * self.d
        if isinstance(t, (int, float)) and self.d == 1:
            tv = (float(t),)
        f = self
        for _ in range(TRANSLATE_REFINE_BUDGET + 1):
            shifts = tuple(c / f.cell_side for c in tv)
            if all(s == int(s) for s in shifts):
                k = tuple(int(s) for s in shifts)
                lo = tuple(l - s for l, s in zip(f.lo, k))
                hi = tuple(h - s for h, s in zip(f.hi, k))
                return StepFunction(f.resolution, lo, hi, f.values)
            f = f.refine(f.resolution - 1)
        raise RefinementBudgetError(
            f"translation by {t} is not a cell multiple within "
            f"{TRANSLATE_REFINE_BUDGET} refinements"
        )

    # ------------------------------------------------------------------ tails

    def tail_mass(self, A: float, p: float) -> float:
        """integral over {|x| > A} of |f|^p, with |x| the max-norm in d = 2.

        Exact: each cell contributes |v|^p times the measure of the part of the
        cell outside [-A, A]^d.
        """
        if A < 0:
            raise ValueError("A must be nonnegative")
        side = self.cell_side
        inside = []
        for axis in range(self.d):
            c0 = np.arange(self.lo[axis], self.hi[axis], dtype=np.float64) * side
            c1 = c0 + side
            overlap = np.minimum(c1, A) - np.maximum(c0, -A)
            inside.append(np.maximum(overlap, 0.0))
        if self.d == 1:
            inside_measure = inside[0]
        else:
            inside_measure = np.multiply.outer(inside[0], inside[1])
        outside = self.cell_measure - inside_measure
        return float((np.abs(self.values) ** p * outside).sum())

    # ------------------------------------------------------------ oscillation

    def oscillation(self, x: float | Sequence[float], delta: float) -> float:
        """sup - inf of f over the open ball (x - delta, x + delta)^d cap box."""
        if delta <= 0:
            raise ValueError("delta must be positive")
        pt = _as_point(x, self.d)
        side = self.cell_side
        sel = []
        for c, l, h in zip(pt, self.lo, self.hi):
            # cell [j*side, (j+1)*side) meets the open (a, b) iff
            # (j+1)*side > a and j*side < b, i.e. floor(a/side) <= j <= ceil(b/side)-1
            j0 = max(l, math.floor((c - delta) / side))
            j1 = min(h - 1, math.ceil((c + delta) / side) - 1)
            if j0 > j1:
                return 0.0
            sel.append(slice(j0 - l, j1 - l + 1))
        region = self.values[tuple(sel)]
        if region.size == 0:
            return 0.0
        return float(region.max() - region.min())

    # --------------------------------------------------------------- restrict

    def restrict(self, interval: DyadicInterval) -> StepFunction:
        """f * 1_I, exactly."""
        return self * StepFunction.indicator(interval, min(self.resolution, interval.scale))

    def support_values_csv_rows(self):
        """(coordinate..., value) rows for CSV export, one per cell."""
        side = self.cell_side
        if self.d == 1:
            for i, v in enumerate(self.values):
                yield ((self.lo[0] + i) * side, float(v))
        else:
            for i in range(self.values.shape[0]):
                for j in range(self.values.shape[1]):
                    yield ((self.lo[0] + i) * side, (self.lo[1] + j) * side, float(self.values[i, j]))


def lp_norm(f: StepFunction, p: float) -> float:
    return f.lp_norm(p)


def inner(f: StepFunction, g: StepFunction) -> float:
    return f.inner(g)


def translate(f: StepFunction, t: float | Sequence[float]) -> StepFunction:
    return f.translate(t)


def tail_mass(f: StepFunction, A: float, p: float) -> float:
    return f.tail_mass(A, p)


def oscillation(f: StepFunction, x: float | Sequence[float], delta: float) -> float:
    return f.oscillation(x, delta)
