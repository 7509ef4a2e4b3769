"""Betti numbers of planar and spatial polygon spaces.

Spatial (``N_l``, the space of n-gons in R^3) counts subsets containing
the last index::

    b_2p(N_l) = sum_{j=0}^{p} [alpha_j(l) - alpha_{n-j-2}(l)]

where ``alpha_j`` counts j-subsets J of {1..n-1} with J + {n} short.

Planar (``M_l``) counts subsets containing a longest bar::

    b_p(M_l) = a_p(l) + a~_p(l) + a_{n-3-p}(l)

with ``a_p`` / ``a~_p`` counting short / median (p+1)-subsets containing a
fixed index of maximal length.

The scalar functions work on one exact ``LengthVector``.  The ``batch_*``
functions evaluate the same counts for many vectors at once; they take a
``(rows, n)`` array of positive int64 weights, so they stay exact as long as
twice the row total fits in 63 bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .core import ENUMERATION_CAP, Emptiness, LengthVector, is_generic, n_nonempty
from .errors import CapacityError, DomainError, EmptinessError, GenericityError

PLANAR = "planar"
SPATIAL = "spatial"


def _count_with_anchor(others: tuple[int, ...], anchor: int, total: int, k: int) -> tuple[int, int]:
    """(short, median) counts of k-subsets S of ``others`` with S + {anchor}.

    Large k is counted through complements within ``others`` so the walk
    covers C(m, min(k, m - k)) subsets.
    """
    m = len(others)
    if k < 0 or k > m:
        return 0, 0
    short = median = 0
    if k <= m - k:
        for combo in combinations(others, k):
            twice = 2 * (anchor + sum(combo))
            if twice < total:
                short += 1
            elif twice == total:
                median += 1
    else:
        # S + {anchor} short  <=>  its complement (a subset of others) is long
        for combo in combinations(others, m - k):
            twice = 2 * sum(combo)
            if twice > total:
                short += 1
            elif twice == total:
                median += 1
    return short, median


def _require_n(lv: LengthVector) -> None:
    if lv.n < 3:
        raise DomainError(f"polygon spaces need n >= 3 links, got {lv.n}")
    if lv.n > ENUMERATION_CAP:
        raise CapacityError(f"n={lv.n} exceeds the enumeration cap {ENUMERATION_CAP}")


def alpha(lv: LengthVector, j: int) -> int:
    """Number of j-subsets J of {1..n-1} such that J + {n} is short."""
    if lv.n > ENUMERATION_CAP:
        raise CapacityError(f"n={lv.n} exceeds the enumeration cap {ENUMERATION_CAP}")
    if not 0 <= j <= lv.n - 1:
        raise DomainError(f"j must lie in 0..{lv.n - 1}, got {j}")
    w = lv.weights
    return _count_with_anchor(w[:-1], w[-1], lv.total_weight, j)[0]


def _max_split(lv: LengthVector) -> tuple[tuple[int, ...], int]:
    w = lv.weights
    i = lv.argmax - 1
    return w[:i] + w[i + 1:], w[i]


def a_counts(lv: LengthVector, p: int) -> tuple[int, int]:
    """``(a_p, a~_p)``: short and median (p+1)-subsets containing the max index."""
    others, anchor = _max_split(lv)
    return _count_with_anchor(others, anchor, lv.total_weight, p)


def betti_n(lv: LengthVector, p: int, *, check_generic: bool = True) -> int:
    """``b_{2p}(N_l)``; defined for generic vectors only."""
    _require_n(lv)
    n = lv.n
    if not 0 <= p <= n - 3:
        raise DomainError(f"p must lie in 0..{n - 3}, got {p}")
    if check_generic and not is_generic(lv):
        raise GenericityError(f"{lv} lies on a wall")
    value = sum(alpha(lv, j) - alpha(lv, n - j - 2) for j in range(p + 1))
    assert value >= 0, f"negative Betti number b_{2 * p} = {value} for {lv}"
    return value


def betti_m(lv: LengthVector, p: int) -> int:
    """``b_p(M_l)``, including the median term on walls."""
    _require_n(lv)
    n = lv.n
    if not 0 <= p <= n - 3:
        raise DomainError(f"p must lie in 0..{n - 3}, got {p}")
    a_p, median_p = a_counts(lv, p)
    a_dual, _ = a_counts(lv, n - 3 - p)
    return a_p + median_p + a_dual


def total_betti_m(lv: LengthVector) -> int:
    """Sum of all planar Betti numbers; requires a generic vector."""
    _require_n(lv)
    if not is_generic(lv):
        raise GenericityError(f"{lv} lies on a wall")
    return sum(betti_m(lv, p) for p in range(lv.n - 2))


def total_betti_bound(n: int) -> int:
    """``2^(n-1) - C(n-1, floor((n-1)/2))``, an upper bound for the total Betti number."""
    return 2 ** (n - 1) - comb(n - 1, (n - 1) // 2)


def tc_n(lv: LengthVector) -> int:
    """Topological complexity of a nonempty spatial polygon space: ``2n - 5``."""
    state = n_nonempty(lv)
    if state is not Emptiness.NONEMPTY:
        raise EmptinessError(f"the spatial polygon space of {lv} is {state.value}")
    return 2 * lv.n - 5


@dataclass(frozen=True)
class BettiProfile:
    space: str
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.space not in (PLANAR, SPATIAL):
            raise ValueError(f"unknown space {self.space!r}")
        expected = self.n - 2 if self.space == PLANAR else 2 * (self.n - 3) + 1
        if len(self.values) != expected:
            raise ValueError(f"{self.space} profile for n={self.n} needs {expected} entries")
        if any(v < 0 for v in self.values):
            raise ValueError("Betti numbers are non-negative")
        if self.space == SPATIAL and any(self.values[1::2]):
            raise ValueError("odd Betti numbers of spatial polygon spaces vanish")

    @property
    def total(self) -> int:
        return sum(self.values)

    def to_dict(self) -> dict:
        return {"space": self.space, "n": self.n, "betti": list(self.values)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> BettiProfile:
        return cls(data["space"], int(data["n"]), tuple(int(v) for v in data["betti"]))

    @classmethod
    def from_json(cls, text: str) -> BettiProfile:
        return cls.from_dict(json.loads(text))


def planar_profile(lv: LengthVector) -> BettiProfile:
    _require_n(lv)
    return BettiProfile(PLANAR, lv.n, tuple(betti_m(lv, p) for p in range(lv.n - 2)))


def spatial_profile(lv: LengthVector) -> BettiProfile:
    _require_n(lv)
    if not is_generic(lv):
        raise GenericityError(f"{lv} lies on a wall")
    values = []
    for p in range(lv.n - 2):
        values.append(betti_n(lv, p, check_generic=False))
        values.append(0)
    return BettiProfile(SPATIAL, lv.n, tuple(values[:-1]))


# -- vectorized kernels ------------------------------------------------------

_CHUNK_ELEMENTS = 1 << 22


@lru_cache(maxsize=256)
def _combo_index(m: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(combinations(range(m), k)), dtype=np.intp).reshape(-1, k)


def _batch_anchor_counts(others: np.ndarray, anchor: np.ndarray, total: np.ndarray, k: int):
    """Row-wise ``(short, median)`` counts, mirroring ``_count_with_anchor``."""
    rows, m = others.shape
    short = np.zeros(rows, dtype=np.int64)
    median = np.zeros(rows, dtype=np.int64)
    if k < 0 or k > m:
        return short, median
    use_complement = k > m - k
    size = m - k if use_complement else k
    idx = _combo_index(m, size)
    step = max(1, _CHUNK_ELEMENTS // max(1, idx.size))
    for lo in range(0, rows, step):
        sl = slice(lo, lo + step)
        sums = others[sl][:, idx].sum(axis=2) if size else np.zeros((others[sl].shape[0], 1), np.int64)
        tot = total[sl, None]
        if use_complement:
            twice = 2 * sums
            short[sl] = (twice > tot).sum(axis=1)
        else:
            twice = 2 * (sums + anchor[sl, None])
            short[sl] = (twice < tot).sum(axis=1)
        median[sl] = (twice == tot).sum(axis=1)
    return short, median


def _as_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.int64)
    if w.ndim != 2:
        raise ValueError("weights must be a 2-D array (rows, n)")
    return w


def batch_alpha(weights, j: int) -> np.ndarray:
    w = _as_weights(weights)
    return _batch_anchor_counts(w[:, :-1], w[:, -1], w.sum(axis=1), j)[0]


def batch_betti_n(weights, p: int) -> np.ndarray:
    """Row-wise ``b_{2p}(N_l)``; rows are assumed generic."""
    w = _as_weights(weights)
    n = w.shape[1]
    if not 0 <= p <= n - 3:
        raise DomainError(f"p must lie in 0..{n - 3}, got {p}")
    others, anchor, total = w[:, :-1], w[:, -1], w.sum(axis=1)
    out = np.zeros(w.shape[0], dtype=np.int64)
    for j in range(p + 1):
        out += _batch_anchor_counts(others, anchor, total, j)[0]
        out -= _batch_anchor_counts(others, anchor, total, n - j - 2)[0]
    assert (out >= 0).all(), "negative spatial Betti number in batch"
    return out


def _split_max(w: np.ndarray):
    rows, n = w.shape
    i = w.argmax(axis=1)
    anchor = w[np.arange(rows), i]
    keep = np.ones_like(w, dtype=bool)
    keep[np.arange(rows), i] = False
    others = w[keep].reshape(rows, n - 1)
    return others, anchor


def batch_betti_m(weights, p: int) -> np.ndarray:
    """Row-wise ``b_p(M_l)``, median term included."""
    w = _as_weights(weights)
    n = w.shape[1]
    if not 0 <= p <= n - 3:
        raise DomainError(f"p must lie in 0..{n - 3}, got {p}")
    others, anchor = _split_max(w)
    total = w.sum(axis=1)
    a_p, med_p = _batch_anchor_counts(others, anchor, total, p)
    a_dual, _ = _batch_anchor_counts(others, anchor, total, n - 3 - p)
    return a_p + med_p + a_dual


def _all_subset_sums(cols: np.ndarray) -> np.ndarray:
    """(rows, 2**m) matrix of all subset sums of the columns."""
    sums = np.zeros((cols.shape[0], 1), dtype=np.int64)
    for c in range(cols.shape[1]):
        sums = np.concatenate([sums, sums + cols[:, c:c + 1]], axis=1)
    return sums


def batch_total_betti_m(weights) -> np.ndarray:
    """Row-wise total planar Betti number of generic rows.

    For generic vectors the total equals twice the number of short subsets
    containing the maximal index.
    """
    w = _as_weights(weights)
    rows, n = w.shape
    others, anchor = _split_max(w)
    total = w.sum(axis=1)
    out = np.zeros(rows, dtype=np.int64)
    m = n - 1
    if m <= 14:
        step = max(1, _CHUNK_ELEMENTS >> m)
        for lo in range(0, rows, step):
            sl = slice(lo, lo + step)
            sums = _all_subset_sums(others[sl])
            out[sl] = (2 * (sums + anchor[sl, None]) < total[sl, None]).sum(axis=1)
    else:
        # meet in the middle, one row at a time
        h = m // 2
        for r in range(rows):
            left = _all_subset_sums(others[r:r + 1, :h])[0] + anchor[r]
            right = np.sort(_all_subset_sums(others[r:r + 1, h:])[0])
            # 2*(a + b) < T  <=>  b < ceil(T/2) - a  <=>  b <= (T - 1)//2 - a
            bound = (total[r] - 1) // 2 - left
            out[r] = np.searchsorted(right, bound, side="right").sum()
    return 2 * out


def batch_is_generic(weights) -> np.ndarray:
    """Row-wise exact genericity test.

    Rows with odd total are generic.  Even rows look for a median subset
    containing column 0 by meeting two halves: values ``2s`` from the left
    half and ``2(T/2 - s') + 1`` from the right half sort next to each other
    exactly when they match.
    """
    w = _as_weights(weights)
    rows, n = w.shape
    total = w.sum(axis=1)
    ok = np.ones(rows, dtype=bool)
    even = np.flatnonzero(total % 2 == 0)
    if even.size == 0:
        return ok
    k = (n + 1) // 2
    width = (1 << (k - 1)) + (1 << (n - k))
    step = max(1, _CHUNK_ELEMENTS // width)
    for lo in range(0, even.size, step):
        sel = even[lo:lo + step]
        ws = w[sel]
        left = _all_subset_sums(ws[:, 1:k]) + ws[:, :1]
        right = (total[sel] // 2)[:, None] - _all_subset_sums(ws[:, k:])
        merged = np.sort(np.concatenate([2 * left, 2 * right + 1], axis=1), axis=1)
        hit = ((np.diff(merged, axis=1) == 1) & (merged[:, :-1] % 2 == 0)).any(axis=1)
        ok[sel[hit]] = False
    return ok


def batch_in_gamma(weights, p: int) -> np.ndarray:
    w = _as_weights(weights)
    if p == 0:
        return np.ones(w.shape[0], dtype=bool)
    top = -np.partition(-w, p - 1, axis=1)[:, :p] if p < w.shape[1] else w
    return 2 * top.sum(axis=1) < w.sum(axis=1)


def batch_in_lambda(weights, p: int) -> np.ndarray:
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    w = _as_weights(weights)
    return 2 * p * w.max(axis=1) >= w.sum(axis=1)


def batch_is_normal(weights) -> np.ndarray:
    """Row-wise normality: every long triple contains one fixed maximal index.

    If any index lies in every long triple then so does a maximal one, and
    the heaviest triple avoiding a maximal index is made of the 2nd-4th
    largest entries; normality reduces to one comparison.
    """
    w = _as_weights(weights)
    rows, n = w.shape
    if n <= 3:
        return np.ones(rows, dtype=bool)
    s = -np.sort(-w, axis=1)
    return 2 * s[:, 1:4].sum(axis=1) <= w.sum(axis=1)
