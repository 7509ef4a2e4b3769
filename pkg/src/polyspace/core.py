"""Length vectors and the short/long/median classification of index subsets.

Every predicate here is decided in exact rational arithmetic.  A length
vector is stored as ``Fraction`` coordinates; the predicates work on the
equivalent integer weights (coordinates times a common denominator), which
is both exact and fast.  Since scaling does not change any predicate, the
functions accept unnormalized vectors too.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import lcm
from numbers import Rational

from .errors import CapacityError, DomainError
from .subsets import MAX_N, SubsetMask, combinations_mask, full_mask

#: Largest n for which a full scan over subsets is allowed.
ENUMERATION_CAP = 30


def parse_rational(value) -> Fraction:
    """Exact rational from ``"3/10"``, ``"0.15"``, an int, a Fraction or a float.

    Decimal strings are read exactly (``"0.1"`` is 1/10); Python floats keep
    their exact binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse {value!r} as a rational") from exc
    raise DomainError(f"cannot interpret {value!r} as a rational")


def parse_lengths(text: str) -> LengthVector:
    """Parse a comma separated list such as ``"1,1,1,1,1"`` or ``"1/10,0.2,7/10"``."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise DomainError("empty length list")
    return LengthVector(parts)


@dataclass(frozen=True)
class LengthVector:
    """Bar lengths ``(l_1, ..., l_n)`` with strictly positive rational entries."""

    coords: tuple[Fraction, ...]
    _weights: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, coords: Iterable):
        values = tuple(parse_rational(c) for c in coords)
        if not values:
            raise DomainError("a length vector needs at least one coordinate")
        if len(values) > MAX_N:
            raise CapacityError(f"at most {MAX_N} links are supported, got {len(values)}")
        for i, v in enumerate(values, start=1):
            if v <= 0:
                raise DomainError(f"coordinate l_{i} = {v} is not positive")
        object.__setattr__(self, "coords", values)
        den = lcm(*(v.denominator for v in values))
        object.__setattr__(self, "_weights", tuple(v.numerator * (den // v.denominator) for v in values))

    @classmethod
    def from_weights(cls, weights: Sequence[int]) -> LengthVector:
        """Normalized vector ``w / sum(w)`` for positive integer weights."""
        total = sum(weights)
        return cls(Fraction(w, total) for w in weights)

    @classmethod
    def equilateral(cls, n: int) -> LengthVector:
        return cls([Fraction(1, n)] * n)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def weights(self) -> tuple[int, ...]:
        """Integer weights proportional to the coordinates."""
        return self._weights

    @cached_property
    def total_weight(self) -> int:
        return sum(self._weights)

    @property
    def normalized(self) -> bool:
        return sum(self.coords) == 1

    @property
    def max_coord(self) -> Fraction:
        """``|l|``, the largest coordinate."""
        return max(self.coords)

    @property
    def argmax(self) -> int:
        """Smallest 1-based index attaining the maximum."""
        m = max(self._weights)
        return self._weights.index(m) + 1

    def normalize(self) -> LengthVector:
        return normalize(self)

    def permuted(self, perm: Sequence[int]) -> LengthVector:
        """Vector whose i-th coordinate is ``coords[perm[i]]`` (0-based ``perm``)."""
        return LengthVector(self.coords[j] for j in perm)

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coords]

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> LengthVector:
        return cls(data)

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


class SubsetClass(enum.Enum):
    SHORT = "short"
    LONG = "long"
    MEDIAN = "median"


class Emptiness(enum.Enum):
    NONEMPTY = "nonempty"
    EMPTY = "empty"
    DEGENERATE = "degenerate"


def normalize(lv: LengthVector) -> LengthVector:
    """Scale so the coordinates sum to exactly 1."""
    total = sum(lv.coords)
    if total == 1:
        return lv
    return LengthVector(c / total for c in lv.coords)


def _check_mask(lv: LengthVector, J: SubsetMask | int) -> int:
    bits = J.bits if isinstance(J, SubsetMask) else int(J)
    if isinstance(J, SubsetMask) and J.n != lv.n:
        raise DomainError(f"subset lives in 1..{J.n} but the vector has n={lv.n}")
    if bits < 0 or bits >> lv.n:
        raise DomainError(f"mask {bits:#x} exceeds n={lv.n}")
    return bits


def masked_weight(weights: Sequence[int], bits: int) -> int:
    s = 0
    i = 0
    while bits:
        if bits & 1:
            s += weights[i]
        bits >>= 1
        i += 1
    return s


def classify_subset(lv: LengthVector, J: SubsetMask | int) -> SubsetClass:
    """Short, long or median, compared exactly against the complement."""
    bits = _check_mask(lv, J)
    twice = 2 * masked_weight(lv.weights, bits)
    total = lv.total_weight
    if twice < total:
        return SubsetClass.SHORT
    if twice == total:
        return SubsetClass.MEDIAN
    return SubsetClass.LONG


def _check_cap(n: int, cap: int | None) -> None:
    cap = ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise CapacityError(f"n={n} exceeds the enumeration cap {cap}")


def _subset_sums(weights: Sequence[int]) -> list[int]:
    sums = [0]
    for w in weights:
        sums += [s + w for s in sums]
    return sums


def median_subsets(lv: LengthVector, cap: int | None = None) -> list[SubsetMask]:
    """All median subsets containing index 1 (each wall listed once)."""
    _check_cap(lv.n, cap)
    w = lv.weights
    total = lv.total_weight
    if total % 2:
        return []
    half = total // 2
    out = []
    rest = full_mask(lv.n - 1)
    for tail in range(rest + 1):
        bits = (tail << 1) | 1
        if masked_weight(w, bits) == half:
            out.append(SubsetMask(bits, lv.n))
    return out


def is_generic(lv: LengthVector, cap: int | None = None) -> bool:
    """True iff no subset is median.

    A median subset has weight exactly half the total, so an odd total is
    generic outright; otherwise the two halves of the index set are matched
    against each other (meet in the middle, O(2**(n/2)) work).
    """
    _check_cap(lv.n, cap)
    w = lv.weights
    total = lv.total_weight
    if total % 2:
        return True
    half = total // 2
    n = lv.n
    # Complement symmetry: some median subset contains index 1 if any exists.
    k = (n + 1) // 2
    left = [w[0] + s for s in _subset_sums(w[1:k])]
    right = sorted(_subset_sums(w[k:]))
    for s in left:
        target = half - s
        j = bisect_left(right, target)
        if j < len(right) and right[j] == target:
            return False
    return True


def in_gamma(lv: LengthVector, p: int) -> bool:
    """Every p-subset is short: the p largest coordinates sum below half."""
    if not 0 <= p <= lv.n:
        raise DomainError(f"p must lie in 0..{lv.n}, got {p}")
    top = sorted(lv.weights, reverse=True)[:p]
    return 2 * sum(top) < lv.total_weight


def in_lambda(lv: LengthVector, p: int) -> bool:
    """Largest coordinate at least 1/(2p) of the total (boundary included)."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    return 2 * p * max(lv.weights) >= lv.total_weight


def n_nonempty(lv: LengthVector) -> Emptiness:
    """Whether the spatial polygon space is nonempty, empty or degenerate."""
    twice_max = 2 * max(lv.weights)
    total = lv.total_weight
    if twice_max > total:
        return Emptiness.EMPTY
    if twice_max == total:
        return Emptiness.DEGENERATE
    return Emptiness.NONEMPTY


def is_normal(lv: LengthVector) -> bool:
    """All long 3-subsets share a common index (vacuously true if none)."""
    w = lv.weights
    total = lv.total_weight
    common = full_mask(lv.n)
    for triple in combinations(range(lv.n), 3):
        if 2 * (w[triple[0]] + w[triple[1]] + w[triple[2]]) > total:
            common &= (1 << triple[0]) | (1 << triple[1]) | (1 << triple[2])
            if not common:
                return False
    return True


def short_subsets(lv: LengthVector, k: int) -> list[SubsetMask]:
    """All short subsets of cardinality k (enumerated, so keep n small)."""
    _check_cap(lv.n, None)
    w = lv.weights
    total = lv.total_weight
    return [SubsetMask(b, lv.n) for b in combinations_mask(lv.n, k) if 2 * masked_weight(w, b) < total]
