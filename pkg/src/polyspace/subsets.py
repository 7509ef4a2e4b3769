"""Bitmask helpers for subsets of {1, ..., n}.

Bit ``i - 1`` of a mask stands for index ``i``; external formats stay 1-based.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from math import comb

MAX_N = 63


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices: Iterable[int]) -> int:
    """Build a mask from 1-based indices."""
    mask = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"indices are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    """1-based indices of the set bits, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def combinations_mask(n: int, k: int) -> Iterator[int]:
    """Yield every k-subset of n bits in increasing numeric order.

    Gosper's hack: each step costs O(1) word operations, so a degree-k
    query walks C(n, k) masks instead of filtering all 2**n.
    """
    if k < 0 or k > n:
        return
    if k == 0:
        yield 0
        return
    limit = 1 << n
    x = (1 << k) - 1
    while x < limit:
        yield x
        low = x & -x
        ripple = x + low
        x = (((ripple ^ x) >> 2) // low) | ripple


def count_combinations(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


class SubsetMask:
    """A subset J of {1, ..., n} stored as a bit set."""

    __slots__ = ("bits", "n")

    def __init__(self, bits: int, n: int):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"ambient size must be in 1..{MAX_N}, got {n}")
        if bits < 0 or bits >> n:
            raise ValueError(f"mask {bits:#x} has bits outside 1..{n}")
        self.bits = bits
        self.n = n

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> SubsetMask:
        return cls(mask_of(indices), n)

    def __len__(self) -> int:
        return popcount(self.bits)

    def __contains__(self, i: int) -> bool:
        return 1 <= i <= self.n and bool(self.bits >> (i - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(indices_of(self.bits))

    def complement(self) -> SubsetMask:
        return SubsetMask(full_mask(self.n) ^ self.bits, self.n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubsetMask):
            return NotImplemented
        return self.bits == other.bits and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.bits, self.n))

    def __repr__(self) -> str:
        return f"SubsetMask({set(indices_of(self.bits)) or '{}'}, n={self.n})"
