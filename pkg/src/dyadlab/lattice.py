"""Dyadic lattice geometry: cubes, Haar functions, truncated lattices.

All coordinates are dyadic rationals held in IEEE doubles.  Endpoints are
integer multiples of powers of two, and multiplying or dividing a double by a
power of two only shifts its exponent, so every geometric predicate here
(membership, containment, partition) is exact -- there is no boundary fuzz.

Dimensions 1 and 2 are supported.  Intervals follow the half-open convention
[a, b) throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import LatticeBudgetError

#: Hard cap on the number of intervals a truncated lattice may enumerate.
MAX_ENUMERATED = 1 << 24


def _as_point(x: float | Sequence[float], d: int) -> tuple[float, ...]:
    if isinstance(x, (int, float)):
        if d != 1:
            raise ValueError(f"scalar point given for dimension {d}")
        return (float(x),)
    pt = tuple(float(c) for c in x)
    if len(pt) != d:
        raise ValueError(f"point has {len(pt)} coordinates, expected {d}")
    return pt


@dataclass(frozen=True)
class DyadicInterval:
    """The dyadic cube ``2^k([0,1)^d + m)``.

    ``scale`` is k (side length ``2^k``), ``index`` is the integer translation
    vector m with one entry per dimension.
    """

    scale: int
    index: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.index, tuple):
            object.__setattr__(self, "index", tuple(self.index))
        if not 1 <= len(self.index) <= 2:
            raise ValueError("only dimensions 1 and 2 are supported")
        if not all(isinstance(i, int) for i in self.index):
            raise TypeError("index entries must be integers")

    @property
    def d(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        """Side length l(I) = 2^k."""
        return 2.0 ** self.scale

    @property
    def measure(self) -> float:
        """Lebesgue measure |I| = 2^{kd}."""
        return 2.0 ** (self.scale * self.d)

    def lower(self) -> tuple[float, ...]:
        return tuple(m * self.side for m in self.index)

    def upper(self) -> tuple[float, ...]:
        return tuple((m + 1) * self.side for m in self.index)

    def center(self) -> tuple[float, ...]:
        return tuple((m + 0.5) * self.side for m in self.index)

    def contains_point(self, x: float | Sequence[float]) -> bool:
        """Exact membership test, sound on any double (all doubles are dyadic)."""
        pt = _as_point(x, self.d)
        return all(math.floor(c / self.side) == m for c, m in zip(pt, self.index))

    def children(self) -> list[DyadicInterval]:
        """The 2^d dyadic children, in lexicographic bit order per axis.

        For d = 1 this is [left half, right half].
        """
        return [
            DyadicInterval(self.scale - 1, tuple(2 * m + e for m, e in zip(self.index, eta)))
            for eta in itertools.product((0, 1), repeat=self.d)
        ]

    def parent(self) -> DyadicInterval:
        return DyadicInterval(self.scale + 1, tuple(m >> 1 for m in self.index))

    def ancestor(self, j: int) -> DyadicInterval:
        """The j-th dyadic ancestor; ancestor(I, 0) = I."""
        if j < 0:
            raise ValueError("ancestor level must be nonnegative")
        return DyadicInterval(self.scale + j, tuple(m >> j for m in self.index))

    def contains(self, other: DyadicInterval) -> bool:
        """Whether ``other`` is contained in this cube (dyadic nesting test)."""
        if other.d != self.d or other.scale > self.scale:
            return False
        return other.ancestor(self.scale - other.scale) == self

    def intersects(self, other: DyadicInterval) -> bool:
        return self.contains(other) or other.contains(self)

    def to_json(self) -> dict:
        return {"k": self.scale, "m": list(self.index)}

    @classmethod
    def from_json(cls, obj: dict) -> DyadicInterval:
        return cls(int(obj["k"]), tuple(int(i) for i in obj["m"]))

    @classmethod
    def unit(cls, d: int = 1) -> DyadicInterval:
        return cls(0, (0,) * d)


def interval_sort_key(I: DyadicInterval) -> tuple:
    """Deterministic ordering used for tie-breaking reported maximizers."""
    return (I.scale, I.index)


@dataclass(frozen=True)
class HaarFunction:
    """A generalized Haar function h_I = sum_J alpha_J 1_J over the children of I.

    The coefficients must cancel: sum_J alpha_J |J| = 0.  In d = 1 the standard
    choice is -1 on the left half and +1 on the right half.
    """

    interval: DyadicInterval
    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        n = 1 << self.interval.d
        if len(self.coeffs) != n:
            raise ValueError(f"expected {n} child coefficients, got {len(self.coeffs)}")
        child_measure = 2.0 ** ((self.interval.scale - 1) * self.interval.d)
        balance = math.fsum(c * child_measure for c in self.coeffs)
        if abs(balance) > 1e-12 * max(1.0, self.sup_norm):
            raise ValueError("Haar coefficients do not cancel: sum alpha_J |J| != 0")

    @property
    def d(self) -> int:
        return self.interval.d

    @property
    def sup_norm(self) -> float:
        return max(abs(c) for c in self.coeffs)

    @classmethod
    def standard(cls, interval: DyadicInterval) -> HaarFunction:
        """d = 1 Haar function: -1 on the left half, +1 on the right half."""
        if interval.d != 1:
            raise ValueError("standard() is the 1-D Haar function; use tensor() in 2-D")
        return cls(interval, (-1.0, 1.0))

    @classmethod
    def tensor(cls, interval: DyadicInterval, kind: int = 1) -> HaarFunction:
        """Tensor-product Haar function of the given kind (1 .. 2^d - 1).

        Bit i of ``kind`` (most significant axis first) selects whether axis i
        carries a sign flip; kind 1 in d = 1 is the standard Haar function.
        All kinds have sup norm 1.
        """
        d = interval.d
        if not 1 <= kind < (1 << d):
            raise ValueError(f"kind must be in 1..{(1 << d) - 1} for d={d}")
        bits = tuple((kind >> (d - 1 - i)) & 1 for i in range(d))
        coeffs = []
        for eta in itertools.product((0, 1), repeat=d):
            sign = 1.0
            for axis, e in enumerate(eta):
                if bits[axis]:
                    sign *= -1.0 if e == 0 else 1.0
            coeffs.append(sign)
        return cls(interval, tuple(coeffs))

    def _child_slot(self, x: tuple[float, ...]) -> int:
        half = self.interval.side / 2.0
        slot = 0
        for c, m in zip(x, self.interval.index):
            bit = math.floor(c / half) - 2 * m
            slot = (slot << 1) | bit
        return slot

    def evaluate(self, x: float | Sequence[float]) -> float:
        """Value at a point: +-alpha_J inside I, 0 outside."""
        pt = _as_point(x, self.d)
        if not self.interval.contains_point(pt):
            return 0.0
        return self.coeffs[self._child_slot(pt)]

    def evaluate_power(self, x: float | Sequence[float], q: int) -> float:
        """Pointwise power h_I^q with the convention h^0 = 1_I.

        Only defined in d = 1 for sup-norm-1 Haar functions, where h^2 = 1_I,
        so odd powers give h_I and even powers (including 0) give 1_I.
        """
        if self.d != 1:
            raise ValueError("Haar powers are only defined in dimension 1")
        if self.sup_norm != 1.0 or set(self.coeffs) != {-1.0, 1.0}:
            raise ValueError("Haar powers require the +-1-valued Haar function")
        if q < 0:
            raise ValueError("power must be nonnegative")
        pt = _as_point(x, 1)
        if not self.interval.contains_point(pt):
            return 0.0
        if q % 2 == 1:
            return self.coeffs[self._child_slot(pt)]
        return 1.0


def haar_eval(h: HaarFunction, x: float | Sequence[float]) -> float:
    return h.evaluate(x)


def haar_power_eval(h: HaarFunction, x: float | Sequence[float], q: int) -> float:
    return h.evaluate_power(x, q)


@dataclass(frozen=True)
class Window:
    """A dyadic box Prod_i [lo_i 2^K, hi_i 2^K) aligned at scale K."""

    scale: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.lo, tuple):
            object.__setattr__(self, "lo", tuple(self.lo))
        if not isinstance(self.hi, tuple):
            object.__setattr__(self, "hi", tuple(self.hi))
        if len(self.lo) != len(self.hi) or not 1 <= len(self.lo) <= 2:
            raise ValueError("window must have 1 or 2 matching axis bounds")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("window must have positive width on every axis")

    @property
    def d(self) -> int:
        return len(self.lo)

    @classmethod
    def symmetric(cls, K: int, d: int = 1) -> Window:
        """The symmetric window [-2^K, 2^K)^d."""
        return cls(K, (-1,) * d, (1,) * d)

    def lower(self) -> tuple[float, ...]:
        return tuple(l * 2.0 ** self.scale for l in self.lo)

    def upper(self) -> tuple[float, ...]:
        return tuple(h * 2.0 ** self.scale for h in self.hi)

    def cell_count(self) -> int:
        return math.prod(h - l for l, h in zip(self.lo, self.hi))

    def contains_interval(self, I: DyadicInterval) -> bool:
        if I.d != self.d or I.scale > self.scale:
            return False
        shift = self.scale - I.scale
        return all(
            (l << shift) <= m < (h << shift)
            for m, l, h in zip(I.index, self.lo, self.hi)
        )

    def to_json(self) -> dict:
        return {"k": self.scale, "lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_json(cls, obj: dict) -> Window:
        return cls(int(obj["k"]), tuple(int(i) for i in obj["lo"]), tuple(int(i) for i in obj["hi"]))


@dataclass(frozen=True)
class TruncatedLattice:
    """All dyadic cubes inside a window with scales in [finest, window.scale].

    Top-scale cells tile the window exactly; every enumerated cube is contained
    in the window.
    """

    window: Window
    finest: int

    def __post_init__(self) -> None:
        if self.finest > self.window.scale:
            raise ValueError(
                f"finest scale {self.finest} is coarser than the window scale "
                f"{self.window.scale}: lattice is degenerate"
            )
        if self.count() > MAX_ENUMERATED:
            raise LatticeBudgetError(
                f"lattice would enumerate {self.count()} intervals "
                f"(budget {MAX_ENUMERATED})"
            )

    @property
    def d(self) -> int:
        return self.window.d

    @property
    def coarsest(self) -> int:
        return self.window.scale

    def scales(self) -> range:
        """Scales in enumeration (descending) order."""
        return range(self.coarsest, self.finest - 1, -1)

    def index_range(self, k: int) -> tuple[tuple[int, int], ...]:
        """Per-axis index range [lo, hi) of scale-k cells inside the window."""
        if not self.finest <= k <= self.coarsest:
            raise ValueError(f"scale {k} outside [{self.finest}, {self.coarsest}]")
        shift = self.coarsest - k
        return tuple((l << shift, h << shift) for l, h in zip(self.window.lo, self.window.hi))

    def count_at(self, k: int) -> int:
        return math.prod(h - l for l, h in self.index_range(k))

    def count(self) -> int:
        return sum(self.count_at(k) for k in self.scales())

    def intervals_at(self, k: int) -> Iterator[DyadicInterval]:
        ranges = self.index_range(k)
        for idx in itertools.product(*(range(l, h) for l, h in ranges)):
            yield DyadicInterval(k, idx)

    def enumerate(self) -> Iterator[DyadicInterval]:
        """Every interval exactly once, in scale-descending order."""
        for k in self.scales():
            yield from self.intervals_at(k)

    def top_cells(self) -> Iterator[DyadicInterval]:
        return self.intervals_at(self.coarsest)

    def contains_interval(self, I: DyadicInterval) -> bool:
        return self.finest <= I.scale and self.window.contains_interval(I)

    def position(self, I: DyadicInterval) -> tuple[int, ...]:
        """Row-position of I inside the per-scale dense arrays."""
        ranges = self.index_range(I.scale)
        if not self.contains_interval(I):
            raise ValueError(f"{I} is not enumerated by this lattice")
        return tuple(m - lo for m, (lo, _) in zip(I.index, ranges))


def lattice(K: int, L: int, d: int = 1) -> TruncatedLattice:
    """The symmetric-window lattice [-2^K, 2^K)^d with finest scale -L."""
    return TruncatedLattice(Window.symmetric(K, d), -L)
