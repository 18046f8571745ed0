"""Haar analysis and synthesis on truncated lattices.

The transform works scale by scale on dense per-scale arrays (a summed-area
pyramid), which keeps the cost linear in the number of enumerated intervals.
Detail coefficients use the unnormalized sup-norm-1 Haar function, so in d = 1

    <f, h_I> = integral over I_+ of f  -  integral over I_- of f,

and truncated expansions carry explicit top-cell averages because a finite
Haar system cannot represent the window mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ScaleMismatchError
from .lattice import DyadicInterval, TruncatedLattice
from .stepfn import StepFunction


def window_values(f: StepFunction, lat: TruncatedLattice, resolution: int) -> np.ndarray:
    """f's cell values on the whole lattice window at the given resolution.

    Raises :class:`ScaleMismatchError` if f is finer than ``resolution`` (the
    re-grid would lose detail) and ``ValueError`` if f's box leaves the window.
    """
    if f.d != lat.d:
        raise ValueError("dimension mismatch between function and lattice")
    if f.resolution < resolution:
        raise ScaleMismatchError(
            f"function at resolution {f.resolution} is finer than {resolution}"
        )
    g = f.refine(resolution)
    shift = lat.coarsest - resolution
    lo = tuple(l << shift for l in lat.window.lo)
    hi = tuple(h << shift for h in lat.window.hi)
    try:
        return g.embed(lo, hi).values
    except ValueError as exc:
        raise ValueError("function support is not contained in the lattice window") from exc


def _block_sum(a: np.ndarray, d: int) -> np.ndarray:
    if d == 1:
        return a.reshape(-1, 2).sum(axis=1)
    n0, n1 = a.shape
    return a.reshape(n0 // 2, 2, n1 // 2, 2).sum(axis=(1, 3))


def _haar_reduce(a: np.ndarray, d: int, kind: int) -> np.ndarray:
    """One-level Haar coefficient reduction of child sums, tensor kind ``kind``."""
    if d == 1:
        return a[1::2] - a[0::2]
    bits = ((kind >> 1) & 1, kind & 1)
    n0, n1 = a.shape
    b = a.reshape(n0 // 2, 2, n1 // 2, 2)
    first = b[:, 1, :, :] - b[:, 0, :, :] if bits[0] else b[:, 1, :, :] + b[:, 0, :, :]
    return first[:, :, 1] - first[:, :, 0] if bits[1] else first[:, :, 1] + first[:, :, 0]


class AnalysisPyramid:
    """Per-scale cell integrals and Haar detail coefficients of one function.

    ``sums[k]`` holds the integral of f over every scale-k cell in the window;
    ``details[k]`` holds <f, h_I> for every scale-k cell (zero at the finest
    scale, where f is constant on cells).
    """

    def __init__(self, f: StepFunction, lat: TruncatedLattice, kind: int = 1):
        self.lattice = lat
        base = window_values(f, lat, lat.finest) * (2.0 ** (lat.finest * lat.d))
        self.sums: dict[int, np.ndarray] = {lat.finest: base}
        self.details: dict[int, np.ndarray] = {}
        for k in range(lat.finest + 1, lat.coarsest + 1):
            below = self.sums[k - 1]
            self.sums[k] = _block_sum(below, lat.d)
            self.details[k] = _haar_reduce(below, lat.d, kind)
        fin = self.sums[lat.finest]
        self.details[lat.finest] = np.zeros_like(fin)

    def functional(self, k: int, alpha_bit: int) -> np.ndarray:
        """<f, h_I^{1+alpha}> for every scale-k cell: details (alpha=0) or sums (alpha=1)."""
        return self.details[k] if alpha_bit == 0 else self.sums[k]


@dataclass(frozen=True)
class HaarExpansion:
    """Sparse Haar data of a step function on a truncated 1-D lattice.

    ``tops`` are the top-cell averages <f>_Q; ``details[k]`` the coefficients
    <f, h_I> per scale-k interval.  Exact on step functions, and complete:

        f = sum_Q <f>_Q 1_Q + sum_I <f, h_I> h_I / |I|.
    """

    lattice: TruncatedLattice
    tops: np.ndarray
    details: dict[int, np.ndarray]

    def detail(self, I: DyadicInterval) -> float:
        (pos,) = self.lattice.position(I)
        return float(self.details[I.scale][pos])

    def top(self, Q: DyadicInterval) -> float:
        if Q.scale != self.lattice.coarsest:
            raise ValueError("top averages live at the coarsest scale")
        (pos,) = self.lattice.position(Q)
        return float(self.tops[pos])

    def nonzero_details(self) -> Iterator[tuple[DyadicInterval, float]]:
        for k in self.lattice.scales():
            arr = self.details[k]
            ((lo, _),) = self.lattice.index_range(k)
            for pos in np.flatnonzero(arr):
                yield DyadicInterval(k, (int(lo + pos),)), float(arr[pos])

    def plancherel_total(self) -> float:
        """sum_Q <f>_Q^2 |Q| + sum_I <f, h_I>^2 / |I| (equals ||f||_2^2)."""
        K = self.lattice.coarsest
        total = float((self.tops ** 2).sum()) * 2.0 ** K
        for k in self.lattice.scales():
            total += float((self.details[k] ** 2).sum()) / 2.0 ** k
        return total

    @classmethod
    def zero(cls, lat: TruncatedLattice) -> HaarExpansion:
        if lat.d != 1:
            raise ValueError("Haar expansions are 1-D")
        tops = np.zeros(lat.count_at(lat.coarsest))
        details = {k: np.zeros(lat.count_at(k)) for k in lat.scales()}
        return cls(lat, tops, details)

    @classmethod
    def from_sparse(
        cls,
        lat: TruncatedLattice,
        details: dict[DyadicInterval, float] | None = None,
        tops: dict[DyadicInterval, float] | None = None,
    ) -> HaarExpansion:
        e = cls.zero(lat)
        for I, v in (details or {}).items():
            (pos,) = lat.position(I)
            e.details[I.scale][pos] = v
        for Q, v in (tops or {}).items():
            if Q.scale != lat.coarsest:
                raise ValueError("top averages live at the coarsest scale")
            (pos,) = lat.position(Q)
            e.tops[pos] = v
        return e

    def to_json(self) -> dict:
        return {
            "window": self.lattice.window.to_json(),
            "finest": self.lattice.finest,
            "tops": [
                {"I": Q.to_json(), "avg": float(v)}
                for Q, v in zip(self.lattice.top_cells(), self.tops)
            ],
            "details": [
                {"I": I.to_json(), "coeff": v} for I, v in self.nonzero_details()
            ],
        }


def analyze(f: StepFunction, lat: TruncatedLattice) -> HaarExpansion:
    """Exact Haar data of f over the enumerated intervals (d = 1).

    Requires f's support inside the window and the lattice at least as fine as
    f, so no detail is dropped.
    """
    if lat.d != 1 or f.d != 1:
        raise ValueError("analyze is defined for d = 1")
    pyramid = AnalysisPyramid(f, lat)
    K = lat.coarsest
    tops = pyramid.sums[K] / 2.0 ** K
    return HaarExpansion(lat, tops, pyramid.details)


def synthesize(e: HaarExpansion) -> StepFunction:
    """Rebuild the step function: sum of top averages plus detail terms.

    Inverse to :func:`analyze` on the window; with exactly representable data
    the round trip is bit-exact.
    """
    lat = e.lattice
    K = lat.coarsest
    # h_I contributions live one level below I; find how deep we must go.
    deepest = lat.finest
    for k in lat.scales():
        if np.any(e.details[k]):
            deepest = min(deepest, k - 1)
    carry = np.array(e.tops, dtype=np.float64)
    for k in range(K, deepest, -1):
        child = np.repeat(carry, 2)
        if k in e.details:
            contrib = e.details[k] / 2.0 ** k
            child[0::2] -= contrib
            child[1::2] += contrib
        carry = child
    shift = K - deepest
    lo = (lat.window.lo[0] << shift,)
    hi = (lat.window.hi[0] << shift,)
    return StepFunction(deepest, lo, hi, carry)
