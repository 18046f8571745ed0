"""The dyadic operator family: shifts, Haar multipliers, paraproducts, commutators.

Every multilinear operator here is a sum over enumerated dyadic intervals of a
per-interval coefficient times a Haar-power output factor:

    multiplier   sum_I eps_I  prod_j (<f_j, h_I^{1+a_j}> / |I|)  h_I^{sigma(a)}
    paraproduct  sum_I (<b, h_I>/|I|) prod_j (<f_j, h_I^{1+a_j}> / |I|) h_I^{1+sigma(a)}
    shift        sum_I (1/|I|) sum_{(I',I'',lam)} lam <f, h_{I'}> h_{I''}

with sigma(a) the number of zero entries of a, and h^q collapsing in d = 1 to
h for odd q and 1_I for even q (h^2 = 1_I).  Applications run scale-by-scale
on dense arrays; a direct per-interval summation oracle lives in the tests.

Operator handles are immutable values so commutators and probes can wrap any
of them uniformly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Protocol, Sequence

import numpy as np

from .errors import DepthError
from .expansion import AnalysisPyramid
from .lattice import DyadicInterval, HaarFunction, TruncatedLattice
from .stepfn import StepFunction


# --------------------------------------------------------------------- types


@dataclass(frozen=True)
class AlphaVector:
    """A selector word in {0,1}^m: 0 pairs a slot with details, 1 with averages."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.bits, tuple):
            object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if len(self.bits) == 0 or any(b not in (0, 1) for b in self.bits):
            raise ValueError("alpha must be a nonempty 0/1 word")

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def sigma(self) -> int:
        """Number of zero components."""
        return self.m - sum(self.bits)

    @property
    def all_ones(self) -> bool:
        return self.sigma == 0

    @classmethod
    def of(cls, *bits: int) -> AlphaVector:
        return cls(tuple(bits))

    def to_json(self) -> list[int]:
        return list(self.bits)


@dataclass(frozen=True)
class Exponents:
    """Integrability exponents p_1..p_m with 1/p = sum_j 1/p_j.

    p_j = 1 is admitted for the weight-theory essential-sup branch; the
    multilinear operator probes require p_j > 1 and check it themselves.
    """

    ps: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.ps, tuple):
            object.__setattr__(self, "ps", tuple(float(p) for p in self.ps))
        if len(self.ps) == 0:
            raise ValueError("at least one exponent required")
        if any(not math.isfinite(p) or p < 1.0 for p in self.ps):
            raise ValueError("exponents must be finite and >= 1")

    @property
    def m(self) -> int:
        return len(self.ps)

    @property
    def p(self) -> float:
        """The target exponent: 1/p = sum 1/p_j."""
        return 1.0 / math.fsum(1.0 / p for p in self.ps)

    def conjugate(self, j: int) -> float:
        """Hoelder conjugate of p_j (0-based slot); inf when p_j = 1."""
        pj = self.ps[j]
        return math.inf if pj == 1.0 else pj / (pj - 1.0)

    def require_open_range(self) -> None:
        if any(p <= 1.0 for p in self.ps):
            raise ValueError("this operation requires every p_j in (1, inf)")

    @classmethod
    def of(cls, *ps: float) -> Exponents:
        return cls(tuple(float(p) for p in ps))

    def to_json(self) -> list[float]:
        return list(self.ps)


@dataclass(frozen=True)
class EpsilonSeq:
    """A bounded coefficient sequence I -> eps_I with a default for unlisted I."""

    default: float = 0.0
    assigned: tuple[tuple[DyadicInterval, float], ...] = ()
    sup_bound: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.assigned, tuple):
            object.__setattr__(self, "assigned", tuple(self.assigned))
        values = [abs(v) for _, v in self.assigned] + [abs(self.default)]
        bound = max(values)
        if self.sup_bound is None:
            object.__setattr__(self, "sup_bound", bound)
        elif bound > self.sup_bound + 1e-12:
            raise ValueError("an assigned value exceeds the declared sup bound")

    @classmethod
    def constant(cls, c: float) -> EpsilonSeq:
        return cls(default=float(c))

    @classmethod
    def from_dict(cls, mapping: dict[DyadicInterval, float], default: float = 0.0) -> EpsilonSeq:
        return cls(default=default, assigned=tuple(sorted(
            mapping.items(), key=lambda kv: (kv[0].scale, kv[0].index))))

    def value(self, I: DyadicInterval) -> float:
        for J, v in self.assigned:
            if J == I:
                return v
        return self.default

    def scale_array(self, lat: TruncatedLattice, k: int) -> np.ndarray:
        """Dense eps values for every scale-k cell of the lattice."""
        shape = tuple(h - l for l, h in lat.index_range(k))
        arr = np.full(shape, self.default)
        for J, v in self.assigned:
            if J.scale == k and lat.contains_interval(J):
                arr[lat.position(J)] = v
        return arr

    def is_constant(self) -> bool:
        return all(v == self.default for _, v in self.assigned)

    def to_json(self) -> dict:
        return {
            "default": self.default,
            "assigned": [{"I": I.to_json(), "eps": v} for I, v in self.assigned],
        }


class MultilinearOperator(Protocol):
    arity: int

    def apply(self, fs: Sequence[StepFunction], lat: TruncatedLattice) -> StepFunction: ...


# ------------------------------------------------------------ shared engine


def _cell_centers(lat: TruncatedLattice, k: int) -> np.ndarray:
    """Centers of the scale-k cells, shaped for StepFunction.evaluate_many."""
    side = 2.0 ** k
    axes = [
        (np.arange(lo, hi, dtype=np.float64) + 0.5) * side
        for lo, hi in lat.index_range(k)
    ]
    if lat.d == 1:
        return axes[0]
    g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
    return np.stack([g0.ravel(), g1.ravel()], axis=1)


def center_values(f: StepFunction, lat: TruncatedLattice, k: int) -> np.ndarray:
    """f evaluated at the centers of the scale-k cells (shape of the cell grid)."""
    shape = tuple(h - l for l, h in lat.index_range(k))
    return f.evaluate_many(_cell_centers(lat, k)).reshape(shape)


def _synthesize_levels(
    lat: TruncatedLattice, levels: dict[int, np.ndarray]
) -> StepFunction:
    """Sum per-scale cell-value contributions into one step function."""
    K = lat.coarsest
    deepest = min(levels.keys(), default=K)
    carry = np.zeros(tuple(h - l for l, h in lat.index_range(K)))
    for k in range(K, deepest - 1, -1):
        if k < K:
            for axis in range(lat.d):
                carry = np.repeat(carry, 2, axis=axis)
        if k in levels:
            carry = carry + levels[k]
    shift = K - deepest
    lo = tuple(l << shift for l in lat.window.lo)
    hi = tuple(h << shift for h in lat.window.hi)
    return StepFunction(deepest, lo, hi, carry)


def _scatter_power(
    levels: dict[int, np.ndarray], lat: TruncatedLattice, k: int,
    coeff: np.ndarray, power: int,
) -> None:
    """Add sum_I coeff_I * h_I^power for scale-k intervals into the level maps."""
    if not np.any(coeff):
        return
    if power % 2 == 0:  # h^even = 1_I (h^0 = 1_I by convention)
        levels.setdefault(k, np.zeros_like(coeff))
        levels[k] = levels[k] + coeff
        return
    if k - 1 < lat.finest:
        raise DepthError(
            f"odd Haar power at scale {k} needs cells at scale {k - 1}, below "
            f"the lattice finest {lat.finest}"
        )
    child = np.repeat(coeff, 2)
    child[0::2] *= -1.0
    shape = tuple(h - l for l, h in lat.index_range(k - 1))
    levels.setdefault(k - 1, np.zeros(shape))
    levels[k - 1] = levels[k - 1] + child


def _multilinear_apply(
    fs: Sequence[StepFunction],
    alpha: AlphaVector,
    lat: TruncatedLattice,
    coefficient: Callable[[int], np.ndarray],
    extra_power: int,
    tops_from: StepFunction | None = None,
) -> StepFunction:
    """Core sum over enumerated I for multiplier-type operators (d = 1).

    ``coefficient(k)`` returns the per-interval prefactor at scale k (eps_I,
    or <b,h_I>/|I|, optionally center-weighted); the slot functionals and the
    output Haar power sigma(alpha) + extra_power are handled here.
    """
    if lat.d != 1:
        raise ValueError("multiplier-type operators are defined in d = 1")
    if len(fs) != alpha.m:
        raise ValueError(f"expected {alpha.m} inputs, got {len(fs)}")
    pyramids = [AnalysisPyramid(f, lat) for f in fs]
    power = alpha.sigma + extra_power
    levels: dict[int, np.ndarray] = {}
    for k in lat.scales():
        meas = 2.0 ** k
        coeff = coefficient(k)
        for pyr, bit in zip(pyramids, alpha.bits):
            coeff = coeff * (pyr.functional(k, bit) / meas)
        _scatter_power(levels, lat, k, coeff, power)
    if tops_from is not None:
        K = lat.coarsest
        top_avgs = AnalysisPyramid(tops_from, lat).sums[K] / 2.0 ** K
        levels.setdefault(K, np.zeros_like(top_avgs))
        levels[K] = levels[K] + top_avgs
    return _synthesize_levels(lat, levels)


# ---------------------------------------------------- multiplier-type handles


@dataclass(frozen=True)
class HaarMultiplier:
    """The multilinear Haar multiplier with coefficients eps_I.

    With unit coefficients, one slot, selector (0,) and ``use_tops`` set, the
    truncated operator reproduces its input exactly on the window: detail
    terms rebuild everything below the top scale and the (unscaled) top-cell
    averages supply the rest.
    """

    eps: EpsilonSeq
    alpha: AlphaVector
    use_tops: bool = False

    def __post_init__(self) -> None:
        if self.alpha.all_ones:
            raise ValueError("the all-ones selector is not admissible for multipliers")
        if self.use_tops and (self.alpha.m != 1 or self.alpha.bits != (0,)):
            raise ValueError("use_tops is only meaningful for m = 1, alpha = (0,)")

    @property
    def arity(self) -> int:
        return self.alpha.m

    def apply(self, fs: Sequence[StepFunction], lat: TruncatedLattice) -> StepFunction:
        return _multilinear_apply(
            fs, self.alpha, lat,
            coefficient=lambda k: self.eps.scale_array(lat, k),
            extra_power=0,
            tops_from=fs[0] if self.use_tops else None,
        )

    def to_json(self) -> dict:
        return {
            "kind": "multiplier",
            "eps": self.eps.to_json(),
            "alpha": self.alpha.to_json(),
            "use_tops": self.use_tops,
        }


def unit_multiplier(alpha: AlphaVector) -> HaarMultiplier:
    """The eps == 1 multiplier (the building block of product reconstruction)."""
    return HaarMultiplier(EpsilonSeq.constant(1.0), alpha)


@dataclass(frozen=True)
class Paraproduct:
    """The multilinear dyadic paraproduct with symbol b.

    Any selector word is admissible here, including all ones (the output power
    1 + sigma is then 1, a plain Haar factor).
    """

    symbol: StepFunction
    alpha: AlphaVector

    @property
    def arity(self) -> int:
        return self.alpha.m

    def apply(self, fs: Sequence[StepFunction], lat: TruncatedLattice) -> StepFunction:
        pyr_b = AnalysisPyramid(self.symbol, lat)
        return _multilinear_apply(
            fs, self.alpha, lat,
            coefficient=lambda k: pyr_b.details[k] / 2.0 ** k,
            extra_power=1,
        )

    def to_json(self) -> dict:
        return {
            "kind": "paraproduct",
            "symbol": self.symbol.to_json(),
            "alpha": self.alpha.to_json(),
        }


def apply_haar_multiplier(
    eps: EpsilonSeq, alpha: AlphaVector, fs: Sequence[StepFunction],
    lat: TruncatedLattice, use_tops: bool = False,
) -> StepFunction:
    return HaarMultiplier(eps, alpha, use_tops).apply(fs, lat)


def apply_unit_multiplier(
    alpha: AlphaVector, fs: Sequence[StepFunction], lat: TruncatedLattice
) -> StepFunction:
    return unit_multiplier(alpha).apply(fs, lat)


def apply_paraproduct(
    b: StepFunction, alpha: AlphaVector, fs: Sequence[StepFunction],
    lat: TruncatedLattice,
) -> StepFunction:
    return Paraproduct(b, alpha).apply(fs, lat)


def apply_multiplier_center_weighted(
    eps: EpsilonSeq, alpha: AlphaVector, fs: Sequence[StepFunction],
    lat: TruncatedLattice, weight: StepFunction,
) -> StepFunction:
    """sum_I eps_I w(x_I) prod_j (<f_j, h_I^{1+a_j}>/|I|) h_I^{sigma}.

    Freezing the symbol at interval centers is what the commutator difference
    splits compare the moving symbol against.
    """
    return _multilinear_apply(
        fs, alpha, lat,
        coefficient=lambda k: eps.scale_array(lat, k) * center_values(weight, lat, k),
        extra_power=0,
    )


def reconstruct_product(
    fs: Sequence[StepFunction], lat: TruncatedLattice, p: float = 1.0
) -> tuple[StepFunction, float]:
    """Sum of unit multipliers over all selectors except all-ones, plus residual.

    The sum reproduces the pointwise product up to the top-scale average
    defect, so the returned L^p residual shrinks as the window grows.
    """
    m = len(fs)
    if m < 2:
        raise ValueError("product reconstruction needs at least two factors")
    total: StepFunction | None = None
    for bits in itertools.product((0, 1), repeat=m):
        if all(b == 1 for b in bits):
            continue
        term = apply_unit_multiplier(AlphaVector(bits), fs, lat)
        total = term if total is None else total + term
    product = fs[0]
    for f in fs[1:]:
        product = product * f
    assert total is not None
    return total, (total - product).lp_norm(p)


def noncompact_family(
    I: DyadicInterval, alpha: AlphaVector, exps: Exponents
) -> list[StepFunction]:
    """Unit-norm probe inputs |I|^{-1/p_j} h_I^{1+alpha_j} pinned to one interval.

    Slot j gets the Haar function on I (alpha_j = 0) or the indicator of I
    (alpha_j = 1), scaled so that its L^{p_j} norm is exactly 1.
    """
    if I.d != 1:
        raise ValueError("the counterexample family is 1-D")
    if exps.m != alpha.m:
        raise ValueError("alpha and exponent arity mismatch")
    out = []
    for bit, pj in zip(alpha.bits, exps.ps):
        base = (
            StepFunction.indicator(I)
            if bit == 1
            else StepFunction.haar(HaarFunction.standard(I))
        )
        out.append(base.scale_by(I.measure ** (-1.0 / pj)))
    return out


# ------------------------------------------------------------- dyadic shifts


@dataclass(frozen=True)
class ShiftTerm:
    """One kernel entry (I, I', I'', lambda) of a dyadic shift."""

    parent: DyadicInterval
    source: HaarFunction
    target: HaarFunction
    coeff: float

    def __post_init__(self) -> None:
        if not self.parent.contains(self.source.interval):
            raise ValueError("source cube must be contained in the parent")
        if not self.parent.contains(self.target.interval):
            raise ValueError("target cube must be contained in the parent")
        if abs(self.coeff) * self.source.sup_norm * self.target.sup_norm > 1.0 + 1e-12:
            raise ValueError("term violates the normalization |lam| |h'|_oo |h''|_oo <= 1")

    @property
    def m(self) -> int:
        return self.parent.scale - self.source.interval.scale

    @property
    def n(self) -> int:
        return self.parent.scale - self.target.interval.scale


@dataclass(frozen=True)
class ShiftSpec:
    """A dyadic shift kernel with scale offsets (m, n) and complexity max(m, n).

    ``terms`` is an explicit kernel list; ``terms = None`` denotes the full
    tensor over every enumerated interval with a single coefficient, i.e. the
    kernel a_I = sum_{I', I''} h_{I'}(y) h_{I''}(x) scaled by ``coeff``.  The
    full tensor extends to arbitrarily deep lattices (each application
    truncates it to the enumerated intervals that are representable).
    """

    m: int
    n: int
    terms: tuple[ShiftTerm, ...] | None = None
    coeff: float = 1.0
    source_kind: int = 1
    target_kind: int = 1

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise ValueError("shift parameters must be nonnegative")
        if self.terms is None:
            if abs(self.coeff) > 1.0 + 1e-12:
                raise ValueError("full-tensor coefficient must satisfy |coeff| <= 1")
            return
        if not isinstance(self.terms, tuple):
            object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.m != self.m or t.n != self.n:
                raise ValueError(
                    f"term scale offsets ({t.m}, {t.n}) do not match the spec "
                    f"({self.m}, {self.n})"
                )

    @property
    def complexity(self) -> int:
        return max(self.m, self.n)

    @property
    def is_full_tensor(self) -> bool:
        return self.terms is None

    @classmethod
    def full_tensor(
        cls, m: int, n: int, coeff: float = 1.0,
        source_kind: int = 1, target_kind: int = 1,
    ) -> ShiftSpec:
        return cls(m, n, None, coeff, source_kind, target_kind)

    @classmethod
    def from_terms(cls, terms: Sequence[ShiftTerm]) -> ShiftSpec:
        if not terms:
            raise ValueError("empty term list; use full_tensor or give terms")
        return cls(terms[0].m, terms[0].n, tuple(terms))

    def parent_scale_range(self, lat: TruncatedLattice) -> range:
        """Scales k of parents I whose sources and targets are representable.

        Sources need child cells at scale k - m - 1 and targets at k - n - 1,
        both at or above the lattice finest scale.
        """
        k_lo = lat.finest + max(self.m, self.n) + 1
        return range(k_lo, lat.coarsest + 1)

    def iter_terms(self, lat: TruncatedLattice) -> Iterator[ShiftTerm]:
        """Materialize the kernel over the lattice (canonical mode generates it)."""
        if self.terms is not None:
            yield from (t for t in self.terms if lat.contains_interval(t.parent))
            return
        for k in self.parent_scale_range(lat):
            for parent in lat.intervals_at(k):
                yield from self._terms_for(parent)

    def _terms_for(self, parent: DyadicInterval) -> Iterator[ShiftTerm]:
        d = parent.d
        for src_idx in itertools.product(
            *(range(mi << self.m, (mi + 1) << self.m) for mi in parent.index)
        ):
            source = HaarFunction.tensor(
                DyadicInterval(parent.scale - self.m, src_idx), self.source_kind
            )
            for tgt_idx in itertools.product(
                *(range(mi << self.n, (mi + 1) << self.n) for mi in parent.index)
            ):
                target = HaarFunction.tensor(
                    DyadicInterval(parent.scale - self.n, tgt_idx), self.target_kind
                )
                yield ShiftTerm(parent, source, target, self.coeff)

    def to_json(self) -> dict:
        if self.is_full_tensor:
            return {
                "kind": "shift", "mode": "full-tensor", "m": self.m, "n": self.n,
                "coeff": self.coeff,
                "source_kind": self.source_kind, "target_kind": self.target_kind,
            }
        return {
            "kind": "shift", "mode": "terms", "m": self.m, "n": self.n,
            "terms": [
                {
                    "I": t.parent.to_json(),
                    "source": {"I": t.source.interval.to_json(), "coeffs": list(t.source.coeffs)},
                    "target": {"I": t.target.interval.to_json(), "coeffs": list(t.target.coeffs)},
                    "lam": t.coeff,
                }
                for t in self.terms
            ],
        }


def _haar_sign_pattern(lat: TruncatedLattice, k: int, kind: int) -> np.ndarray:
    """Global array of Haar child signs at scale k (children of scale k+1 cells).

    Window bounds are even in child units, so absolute index parity equals the
    within-parent child bit on each axis.
    """
    shape = tuple(h - l for l, h in lat.index_range(k))
    if lat.d == 1:
        pattern = np.ones(shape[0])
        pattern[0::2] = -1.0
        return pattern
    bits = ((kind >> 1) & 1, kind & 1)
    ax0 = np.ones(shape[0])
    ax1 = np.ones(shape[1])
    if bits[0]:
        ax0[0::2] = -1.0
    if bits[1]:
        ax1[0::2] = -1.0
    return np.multiply.outer(ax0, ax1)


def _block_reduce(a: np.ndarray, factor: int, d: int) -> np.ndarray:
    if factor == 1:
        return a
    if d == 1:
        return a.reshape(-1, factor).sum(axis=1)
    n0, n1 = a.shape
    return a.reshape(n0 // factor, factor, n1 // factor, factor).sum(axis=(1, 3))


def _expand(a: np.ndarray, factor: int, d: int) -> np.ndarray:
    for axis in range(d):
        a = np.repeat(a, factor, axis=axis)
    return a


def apply_shift(
    spec: ShiftSpec,
    f: StepFunction,
    lat: TruncatedLattice,
    source_center_weight: StepFunction | None = None,
) -> StepFunction:
    """Apply the dyadic shift over the enumerated intervals.

    ``source_center_weight`` multiplies each term by w(x_{I'}) (the weight
    evaluated at the source cube's center); the commutator difference splits
    need exactly that hook.
    """
    if f.d != lat.d:
        raise ValueError("dimension mismatch")
    if spec.is_full_tensor:
        return _apply_shift_full(spec, f, lat, source_center_weight)
    return _apply_shift_terms(spec, f, lat, source_center_weight)


def _apply_shift_full(
    spec: ShiftSpec, f: StepFunction, lat: TruncatedLattice,
    weight: StepFunction | None,
) -> StepFunction:
    d = lat.d
    pyr = AnalysisPyramid(f, lat, kind=spec.source_kind)
    levels: dict[int, np.ndarray] = {}
    for k in spec.parent_scale_range(lat):
        src = pyr.details[k - spec.m]
        if weight is not None:
            src = src * center_values(weight, lat, k - spec.m)
        per_parent = _block_reduce(src, 1 << spec.m, d)
        if not np.any(per_parent):
            continue
        scale_factor = spec.coeff / 2.0 ** (k * d)
        child_vals = _expand(per_parent * scale_factor, 1 << (spec.n + 1), d)
        child_vals = child_vals * _haar_sign_pattern(lat, k - spec.n - 1, spec.target_kind)
        key = k - spec.n - 1
        levels.setdefault(key, np.zeros_like(child_vals))
        levels[key] = levels[key] + child_vals
    return _synthesize_levels(lat, levels)


def _apply_shift_terms(
    spec: ShiftSpec, f: StepFunction, lat: TruncatedLattice,
    weight: StepFunction | None,
) -> StepFunction:
    pyr_base = AnalysisPyramid(f, lat)
    levels: dict[int, np.ndarray] = {}
    for term in spec.iter_terms(lat):
        src_child_scale = term.source.interval.scale - 1
        tgt_child_scale = term.target.interval.scale - 1
        if src_child_scale < lat.finest or tgt_child_scale < lat.finest:
            raise DepthError(
                f"term at parent scale {term.parent.scale} needs cells below the "
                f"lattice finest scale {lat.finest}"
            )
        coeff = math.fsum(
            c * pyr_base.sums[src_child_scale][lat.position(child)]
            for c, child in zip(term.source.coeffs, term.source.interval.children())
        )
        if weight is not None:
            coeff *= weight.evaluate(term.source.interval.center())
        coeff *= term.coeff / term.parent.measure
        if coeff == 0.0:
            continue
        shape = tuple(h - l for l, h in lat.index_range(tgt_child_scale))
        levels.setdefault(tgt_child_scale, np.zeros(shape))
        for c, child in zip(term.target.coeffs, term.target.interval.children()):
            levels[tgt_child_scale][lat.position(child)] += coeff * c
    return _synthesize_levels(lat, levels)


@dataclass(frozen=True)
class DyadicShift:
    """Operator handle wrapping a shift kernel (arity 1)."""

    spec: ShiftSpec
    arity: int = field(default=1, init=False)

    def apply(self, fs: Sequence[StepFunction], lat: TruncatedLattice) -> StepFunction:
        (f,) = fs
        return apply_shift(self.spec, f, lat)

    def to_json(self) -> dict:
        return self.spec.to_json()


# --------------------------------------------------------------- commutators


@dataclass(frozen=True)
class Commutator:
    """[b, T]_slot : b T(f) - T(..., b f_slot, ...), at common refinement."""

    symbol: StepFunction
    inner: MultilinearOperator
    slot: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.slot <= self.inner.arity:
            raise ValueError(f"slot {self.slot} out of range 1..{self.inner.arity}")

    @property
    def arity(self) -> int:
        return self.inner.arity

    def apply(self, fs: Sequence[StepFunction], lat: TruncatedLattice) -> StepFunction:
        modified = list(fs)
        modified[self.slot - 1] = self.symbol * fs[self.slot - 1]
        return self.symbol * self.inner.apply(fs, lat) - self.inner.apply(modified, lat)

    def to_json(self) -> dict:
        return {
            "kind": "commutator",
            "symbol": self.symbol.to_json(),
            "slot": self.slot,
            "inner": self.inner.to_json(),  # type: ignore[attr-defined]
        }


def commutator(
    b: StepFunction, op: MultilinearOperator, slot: int,
    fs: Sequence[StepFunction], lat: TruncatedLattice,
) -> StepFunction:
    return Commutator(b, op, slot).apply(fs, lat)


def iterated_commutator_operator(
    symbols: Sequence[StepFunction], inner: MultilinearOperator
) -> MultilinearOperator:
    """Nest one commutator per slot: [b_1, [b_2, ... [b_m, T]_m ...]_2]_1."""
    if len(symbols) != inner.arity:
        raise ValueError(
            f"need one symbol per slot: got {len(symbols)} for arity {inner.arity}"
        )
    op: MultilinearOperator = inner
    for slot in range(len(symbols), 0, -1):
        op = Commutator(symbols[slot - 1], op, slot)
    return op


def apply_iterated_commutator(
    symbols: Sequence[StepFunction], eps: EpsilonSeq, alpha: AlphaVector,
    fs: Sequence[StepFunction], lat: TruncatedLattice,
) -> StepFunction:
    op = iterated_commutator_operator(symbols, HaarMultiplier(eps, alpha))
    return op.apply(fs, lat)
