"""Chamber codes and exhaustive enumeration of chamber orbits.

For an ascending-sorted generic vector, the short/long status of every
subset follows from the subsets containing the top index n, and shortness
is inherited downward along the dominance order (drop an element, or
replace one by a smaller index).  The code of a chamber orbit is therefore
the antichain of dominance-maximal short subsets containing n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .core import LengthVector, is_generic
from .errors import CapacityError, DomainError, GenericityError
from .lp import LinearConstraintSystem, feasible_point
from .subsets import indices_of

CODE_CAP = 16
ENUMERATE_RANGE = (3, 9)


@dataclass(frozen=True, order=True)
class ChamberCode:
    n: int
    maximal_shorts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        subsets = tuple(sorted(tuple(sorted(s)) for s in self.maximal_shorts))
        for s in subsets:
            if not s or s[-1] != self.n or s[0] < 1:
                raise ValueError(f"{s} is not a subset of 1..{self.n} containing {self.n}")
        for a in subsets:
            for b in subsets:
                if a != b and dominated(a, b):
                    raise ValueError(f"{a} is dominated by {b}; not an antichain")
        object.__setattr__(self, "maximal_shorts", subsets)

    def short_family(self) -> frozenset[tuple[int, ...]]:
        """Every short subset containing n implied by the code."""
        out = set()
        for bits in range(1 << (self.n - 1)):
            s = indices_of(bits) + (self.n,)
            if any(dominated(s, m) for m in self.maximal_shorts):
                out.add(s)
        return frozenset(out)

    def to_dict(self) -> dict:
        return {"n": self.n, "maximal_shorts": [list(s) for s in self.maximal_shorts]}

    @classmethod
    def from_dict(cls, data: dict) -> ChamberCode:
        return cls(int(data["n"]), tuple(tuple(s) for s in data["maximal_shorts"]))

    def __str__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, s)) + "}" for s in self.maximal_shorts)
        return "{" + inner + "}"


def dominated(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """True iff a is below b: ``|a| <= |b|`` and the k-th largest of a never exceeds that of b."""
    if len(a) > len(b):
        return False
    ra = sorted(a, reverse=True)
    rb = sorted(b, reverse=True)
    return all(x <= y for x, y in zip(ra, rb))


def _sorted_weights(lv: LengthVector) -> tuple[int, ...]:
    return tuple(sorted(lv.weights))


def chamber_code(lv: LengthVector) -> ChamberCode:
    n = lv.n
    if n > CODE_CAP:
        raise CapacityError(f"chamber codes are limited to n <= {CODE_CAP}, got {n}")
    if not is_generic(lv):
        raise GenericityError(f"{lv} lies on a wall")
    w = _sorted_weights(lv)
    total = sum(w)
    shorts = []
    for bits in range(1 << (n - 1)):
        s = indices_of(bits) + (n,)
        if 2 * sum(w[i - 1] for i in s) < total:
            shorts.append(s)
    maximal = [s for s in shorts if not any(s != t and dominated(s, t) for t in shorts)]
    return ChamberCode(n, tuple(maximal))


def same_chamber_orbit(a: LengthVector, b: LengthVector) -> bool:
    if a.n != b.n:
        raise DomainError(f"vectors have different sizes {a.n} and {b.n}")
    return chamber_code(a) == chamber_code(b)


# -- enumeration --------------------------------------------------------------


@dataclass(frozen=True)
class _Lattice:
    """Subsets containing n, in a linear extension of dominance."""

    n: int
    subsets: tuple[tuple[int, ...], ...]
    rows: tuple[tuple[int, ...], ...]
    above: tuple[int, ...]  # bitset of strictly dominating subsets
    below: tuple[int, ...]  # bitset of strictly dominated subsets
    ordering_rows: tuple[tuple[int, ...], ...] = field(repr=False)


@lru_cache(maxsize=None)
def _lattice(n: int) -> _Lattice:
    subsets = [indices_of(bits) + (n,) for bits in range(1 << (n - 1))]
    subsets.sort(key=lambda s: (len(s), sum(s), s))
    count = len(subsets)
    above = [0] * count
    below = [0] * count
    for i, a in enumerate(subsets):
        for j, b in enumerate(subsets):
            if i != j and dominated(a, b):
                above[i] |= 1 << j
                below[j] |= 1 << i
    rows = tuple(tuple(1 if k in s else -1 for k in range(1, n + 1)) for s in subsets)
    ordering = []
    for i in range(n - 1):
        row = [0] * n
        row[i], row[i + 1] = 1, -1
        ordering.append(tuple(row))
    return _Lattice(n, tuple(subsets), rows, tuple(above), tuple(below), tuple(ordering))


@dataclass(frozen=True)
class ChamberOrbit:
    code: ChamberCode
    witness: LengthVector

    def to_dict(self) -> dict:
        from .betti import planar_profile, spatial_profile

        return {
            "code": self.code.to_dict()["maximal_shorts"],
            "witness": self.witness.to_json(),
            "planar_betti": list(planar_profile(self.witness).values),
            "spatial_betti": list(spatial_profile(self.witness).values),
        }


@dataclass
class EnumerationStats:
    lp_calls: int = 0
    nodes: int = 0


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def enumerate_chamber_orbits(n: int, *, stats: EnumerationStats | None = None) -> list[ChamberOrbit]:
    """Every chamber orbit for n links, with an exact witness each.

    Depth-first over the subsets containing n in dominance order.  A subset
    whose status is implied by an earlier one is not branched on; otherwise
    the current witness settles one side for free and one LP decides
    whether the wall cuts the current region.
    """
    lo, hi = ENUMERATE_RANGE
    if not lo <= n <= hi:
        raise CapacityError(f"orbit enumeration supports {lo} <= n <= {hi}, got {n}")
    lat = _lattice(n)
    stats = stats if stats is not None else EnumerationStats()
    base = LinearConstraintSystem(n, lat.ordering_rows)
    start = feasible_point(base)
    assert start is not None
    found: list[ChamberOrbit] = []
    count = len(lat.subsets)

    def boundary_rows(short_set: int, long_set: int, extra: tuple[int, ...]):
        rows = [extra]
        for i in _bits(short_set):
            if not lat.above[i] & short_set:
                rows.append(lat.rows[i])
        for i in _bits(long_set):
            if not lat.below[i] & long_set:
                rows.append(tuple(-c for c in lat.rows[i]))
        return base.with_rows(rows)

    def side(witness: tuple[Fraction, ...], i: int) -> int:
        value = sum(c * v for c, v in zip(lat.rows[i], witness))
        return (value > 0) - (value < 0)

    def leaf(short_set: int, witness):
        maximal = tuple(lat.subsets[i] for i in _bits(short_set) if not lat.above[i] & short_set)
        found.append(ChamberOrbit(ChamberCode(n, maximal), LengthVector(witness)))

    def descend(pos: int, short_set: int, long_set: int, witness):
        stats.nodes += 1
        while pos < count:
            bit = 1 << pos
            if lat.above[pos] & short_set:
                short_set |= bit
            elif lat.below[pos] & long_set:
                long_set |= bit
            else:
                break
            pos += 1
        if pos == count:
            leaf(short_set, witness)
            return
        bit = 1 << pos
        s = side(witness, pos)
        # short first
        for want_short in (True, False):
            if (s < 0 and want_short) or (s > 0 and not want_short):
                child = witness
            else:
                row = lat.rows[pos] if want_short else tuple(-c for c in lat.rows[pos])
                stats.lp_calls += 1
                child = feasible_point(boundary_rows(short_set, long_set, row))
                if child is None:
                    continue
            if want_short:
                descend(pos + 1, short_set | bit, long_set, child)
            else:
                descend(pos + 1, short_set, long_set | bit, child)

    descend(0, 0, 0, start)
    found.sort(key=lambda o: o.code)
    return found


def orbit_count(n: int) -> int:
    return len(enumerate_chamber_orbits(n))


def dump_orbits(orbits: list[ChamberOrbit], n: int) -> str:
    return json.dumps({"n": n, "count": len(orbits), "orbits": [o.to_dict() for o in orbits]}, indent=1)
