"""Counter-based deterministic random generation for probe batches.

Every batch element gets its own Philox stream keyed by (seed, element index),
so results are reproducible bit for bit regardless of evaluation order.
"""

from __future__ import annotations

import numpy as np

from .lattice import TruncatedLattice
from .operators import Exponents
from .stepfn import StepFunction


def element_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & (2**64 - 1)), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_window_step(
    rng: np.random.Generator, lat: TruncatedLattice, mantissa_bits: int | None = None
) -> StepFunction:
    """A random step function on the whole window at the lattice resolution.

    With ``mantissa_bits`` set, values are dyadic rationals with that many
    fractional bits, keeping all pyramid sums exactly representable.
    """
    shape = tuple((h - l) << (lat.coarsest - lat.finest) for l, h in zip(lat.window.lo, lat.window.hi))
    if mantissa_bits is None:
        values = rng.standard_normal(shape)
    else:
        scale = 1 << mantissa_bits
        values = rng.integers(-scale, scale, size=shape) / float(scale)
    return StepFunction.on_window(lat.window, lat.finest, values)


def random_unit_inputs(
    seed: int, index: int, lat: TruncatedLattice, exps: Exponents
) -> list[StepFunction]:
    """One batch element: a random input tuple normalized to unit L^{p_j} norms."""
    rng = element_rng(seed, index)
    out = []
    for pj in exps.ps:
        f = random_window_step(rng, lat)
        norm = f.lp_norm(pj)
        out.append(f.scale_by(1.0 / norm) if norm > 0.0 else f)
    return out
