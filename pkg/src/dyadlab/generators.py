"""Named input generators: reference symbols and probe inputs.

All samplers produce exact cell averages, so step versions of piecewise-linear
functions keep their pairings with Haar functions unchanged whenever the Haar
halves are unions of cells.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .lattice import DyadicInterval, HaarFunction, Window
from .stepfn import StepFunction


def haar_input(interval: DyadicInterval) -> StepFunction:
    return StepFunction.haar(HaarFunction.standard(interval))


def indicator_input(interval: DyadicInterval) -> StepFunction:
    return StepFunction.indicator(interval)


def hat_symbol(
    resolution: int, half_width: float = 1.0, center: float = 0.0, height: float = 1.0
) -> StepFunction:
    """The tent height*max(0, 1 - |x - center|/half_width), cell-averaged exactly."""
    side = 2.0 ** resolution
    lo = math.floor((center - half_width) / side)
    hi = math.ceil((center + half_width) / side)
    edges = np.arange(lo, hi + 1, dtype=np.float64) * side

    def antideriv(x: np.ndarray) -> np.ndarray:
        x = np.clip(x, center - half_width, center + half_width)
        u = x - center
        return height * (u - np.sign(u) * u * u / (2.0 * half_width))

    cell_avgs = (antideriv(edges[1:]) - antideriv(edges[:-1])) / side
    return StepFunction(resolution, (lo,), (hi,), cell_avgs)


def hat_symbol_2d(resolution: int, half_width: float = 1.0, height: float = 1.0) -> StepFunction:
    """Tensor tent on (-w, w)^2 with exact cell averages."""
    one_d = hat_symbol(resolution, half_width, 0.0, 1.0)
    vals = height * np.multiply.outer(one_d.values, one_d.values)
    return StepFunction(resolution, (one_d.lo[0],) * 2, (one_d.hi[0],) * 2, vals)


def alternating_blocks_symbol(resolution: int) -> StepFunction:
    """The bounded non-smooth symbol: alternating-sign blocks accumulating at 1.

    Block k (k >= 1) is the dyadic interval [1 - 3*2^{-(k+1)}, 1 - 2^{-k}) of
    length 2^{-(k+1)}, carrying the value (-1)^k; the sum is truncated at the
    deepest block the resolution can hold.
    """
    L = -resolution
    if L < 2:
        raise ValueError("resolution too coarse to hold any block")
    n = 1 << L
    values = np.zeros(n)
    for k in range(1, L):
        lo_cell = n - 3 * (1 << (L - k - 1))
        hi_cell = n - (1 << (L - k))
        values[lo_cell:hi_cell] = (-1.0) ** k
    return StepFunction(resolution, (0,), (n,), values)


def edge_plateau(k0: int) -> StepFunction:
    """The tall plateau -2^{k0} on the dyadic interval 2^{-k0}([0,1) + 2^{k0} - 2).

    Its L^p norm is 2^{k0(1 - 1/p)}, deliberately not normalized; pair with
    explicit rescaling when a unit-ball input is wanted.
    """
    if k0 < 1:
        raise ValueError("k0 must be at least 1")
    I = DyadicInterval(-k0, ((1 << k0) - 2,))
    return StepFunction.indicator(I).scale_by(-(2.0 ** k0))


def sample_piecewise_linear(
    edge_fn: Callable[[np.ndarray], np.ndarray], window: Window, resolution: int
) -> StepFunction:
    """Exact cell averages of a function linear between consecutive cell edges."""
    shift = window.scale - resolution
    lo = window.lo[0] << shift
    hi = window.hi[0] << shift
    edges = np.arange(lo, hi + 1, dtype=np.float64) * 2.0 ** resolution
    vals = edge_fn(edges)
    cell_avgs = 0.5 * (vals[:-1] + vals[1:])
    return StepFunction(resolution, (lo,), (hi,), cell_avgs)


def random_lipschitz_case(
    rng: np.random.Generator, window: Window, resolution: int
) -> tuple[StepFunction, float]:
    """A random piecewise-linear input with kinks on the cell grid.

    Returns the exactly sampled step function together with an upper bound on
    its Lipschitz constant (slope magnitudes add).
    """
    side = 2.0 ** resolution
    wlo = window.lo[0] * 2.0 ** window.scale
    whi = window.hi[0] * 2.0 ** window.scale
    slope = float(rng.uniform(-1.0, 1.0))
    pieces: list[tuple[float, float, float]] = []  # (center, half_width, height)
    for _ in range(int(rng.integers(1, 4))):
        scale_pick = int(rng.integers(resolution + 1, window.scale))
        half_width = 2.0 ** scale_pick
        grid_pos = int(rng.integers(int(wlo / side) + 1, int(whi / side) - 1))
        center = grid_pos * side
        height = float(rng.uniform(-1.0, 1.0))
        pieces.append((center, half_width, height))
    lip = abs(slope) + math.fsum(abs(h) / w for _, w, h in pieces)

    def edge_fn(x: np.ndarray) -> np.ndarray:
        out = slope * (x - wlo)
        for center, half_width, height in pieces:
            out = out + height * np.maximum(0.0, 1.0 - np.abs(x - center) / half_width)
        return out

    return sample_piecewise_linear(edge_fn, window, resolution), lip


GENERATORS = {
    "haar": "Haar function of a dyadic interval (args: k, m)",
    "indicator": "indicator of a dyadic interval (args: k, m)",
    "hat": "tent function sampled by exact cell averages "
           "(args: resolution, half_width, center, height)",
    "alternating-blocks": "bounded alternating-sign block symbol accumulating at 1 "
                          "(args: resolution)",
    "edge-plateau": "tall plateau of height -2^{k0} just left of 1 (args: k0)",
    "noncompact-family": "unit-norm pinned inputs for one interval "
                         "(args: k, m, alpha, exponents)",
}
