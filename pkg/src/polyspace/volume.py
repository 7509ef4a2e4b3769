"""Exact relative volumes of simplex slices and the region bounds built on them.

Everything returns ``Fraction``; decimals are for display only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .core import parse_rational
from .errors import DomainError

HALF = Fraction(1, 2)


def _check_pq(p: int, q: int) -> None:
    if p < 1 or q < 1:
        raise DomainError(f"need p >= 1 and q >= 1, got p={p}, q={q}")


def frustum_ratio(x, p: int, q: int) -> Fraction:
    """Fraction of a simplex cut off by ``{phi <= x}``.

    ``phi`` is the affine functional equal to -1 on p vertices and +1 on the
    other q vertices.  The value is the degree ``p + q - 1`` polynomial
    ``((x+1)/2)^q * sum_{k<p} C(q-1+k, q-1) ((1-x)/2)^k``.
    """
    _check_pq(p, q)
    x = parse_rational(x)
    if not -1 <= x <= 1:
        raise DomainError(f"x must lie in [-1, 1], got {x}")
    up = (x + 1) / 2
    down = (1 - x) / 2
    acc = Fraction(0)
    power = Fraction(1)
    for k in range(p):
        acc += comb(q - 1 + k, q - 1) * power
        power *= down
    return up**q * acc


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return out


def _poly_add(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if len(a) < len(b):
        a, b = b, a
    return [u + (b[i] if i < len(b) else 0) for i, u in enumerate(a)]


def frustum_coefficients(p: int, q: int) -> list[Fraction]:
    """Monomial coefficients (ascending powers of x) of the frustum polynomial."""
    _check_pq(p, q)
    up = [HALF, HALF]
    down = [HALF, -HALF]
    head = [Fraction(1)]
    for _ in range(q):
        head = _poly_mul(head, up)
    tail = [Fraction(0)]
    power = [Fraction(1)]
    for k in range(p):
        tail = _poly_add(tail, [comb(q - 1 + k, q - 1) * c for c in power])
        power = _poly_mul(power, down)
    return _poly_mul(head, tail)


def r0(p: int, q: int) -> Fraction:
    """``r_{p,q} = 2^-q sum_{k<p} C(q-1+k, k) 2^-k``, the frustum ratio at 0."""
    _check_pq(p, q)
    return sum((Fraction(comb(q - 1 + k, k), 2 ** (q + k)) for k in range(p)), Fraction(0))


def beta_tail_half(p: int, q: int) -> Fraction:
    """``P(X >= 1/2)`` for ``X ~ Beta(p, q)`` with integer parameters.

    Equals ``P(Bin(p+q-1, 1/2) <= p-1)``.
    """
    _check_pq(p, q)
    m = p + q - 1
    return Fraction(sum(comb(m, k) for k in range(p)), 2**m)


def vj_ratio(n: int, p: int) -> Fraction:
    """Relative volume of ``{l : sum_{i in J} l_i >= 1/2}`` for any ``|J| = p``."""
    if not 1 <= p < n:
        raise DomainError(f"need 1 <= p < n, got n={n}, p={p}")
    return r0(p, n - p)


@dataclass(frozen=True)
class GammaBound:
    """Lower bounds for the relative volume of the region where all p-subsets are short."""

    n: int
    p: int
    headline: Fraction
    union: Fraction

    @property
    def best(self) -> Fraction:
        return max(self.headline, self.union)


def gamma_lower_bound(n: int, p: int) -> Fraction:
    """``max(0, 1 - n^(2p) / 2^n)``."""
    if n < 1 or p < 1:
        raise DomainError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    return max(Fraction(0), 1 - Fraction(n ** (2 * p), 2**n))


def gamma_union_bound(n: int, p: int) -> Fraction:
    """``max(0, 1 - C(n, p) r_{p,n-p})``, the union bound over all p-subsets (0 for p >= n)."""
    if n < 1 or p < 1:
        raise DomainError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    if p >= n:
        return Fraction(0)
    return max(Fraction(0), 1 - comb(n, p) * vj_ratio(n, p))


def gamma_bounds(n: int, p: int) -> GammaBound:
    return GammaBound(n, p, gamma_lower_bound(n, p), gamma_union_bound(n, p))


def lambda_bound(n: int, p: int) -> Fraction:
    """``n ((2p-1)/(2p))^(n-1)``, an upper bound for the uniform mass of Lambda_p."""
    if n < 1 or p < 1:
        raise DomainError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    return n * Fraction(2 * p - 1, 2 * p) ** (n - 1)


def decimal(value: Fraction, digits: int = 12) -> str:
    """Fixed-point rendering of an exact rational, rounded half-even."""
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = digits + 30
        d = Decimal(value.numerator) / Decimal(value.denominator)
        return format(d, f".{digits}f")
