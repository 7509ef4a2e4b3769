"""Exact strict-feasibility test for small systems of linear inequalities.

A system ``a_k . l < 0`` (k = 1..m) together with ``l_i > 0`` and
``sum(l) = 1`` is nonempty iff the margin program

    maximize  s
    subject   a_k . l + s <= 0,   -l_i + s <= 0,   sum(l) <= 1,   l >= 0

has a positive optimum (scale any strict solution down into ``sum(l) <= 1``).
Substituting ``s = t - 1`` gives a program with nonnegative right-hand
sides, so the all-slack basis is feasible and no phase one is needed.

The simplex runs on an integer tableau with fraction-free (Bareiss)
pivoting: every entry stays an integer and the true tableau is the stored
one divided by the last pivot.  Bland's rule prevents cycling.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .errors import DomainError


@dataclass(frozen=True)
class LinearConstraintSystem:
    """Strict inequalities ``sum_i c_i l_i < 0`` over positive, normalized l."""

    n: int
    rows: tuple[tuple[Fraction, ...], ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("a constraint system needs at least one variable")
        rows = tuple(tuple(Fraction(c) for c in row) for row in self.rows)
        for row in rows:
            if len(row) != self.n:
                raise DomainError(f"constraint has {len(row)} coefficients, expected {self.n}")
        object.__setattr__(self, "rows", rows)

    def with_rows(self, extra: Iterable[Sequence]) -> LinearConstraintSystem:
        return LinearConstraintSystem(self.n, self.rows + tuple(tuple(r) for r in extra))

    def satisfied_by(self, point: Sequence) -> bool:
        """Exact check that ``point`` is a strict interior solution."""
        pt = [Fraction(v) for v in point]
        if len(pt) != self.n or any(v <= 0 for v in pt) or sum(pt) != 1:
            return False
        return all(sum(c * v for c, v in zip(row, pt)) < 0 for row in self.rows)


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    den = lcm(*(c.denominator for c in row)) if row else 1
    return [int(c * den) for c in row]


def maximize_margin(system: LinearConstraintSystem, stop_above: Fraction | None = None):
    """Solve the margin program exactly.

    Returns ``(margin, point)``: the optimal (or, with ``stop_above``, the
    first basic value exceeding it) margin ``s`` and the corresponding
    ``l``.  The point is not normalized.
    """
    n = system.n
    # columns: l_1..l_n, t, then one slack per row
    constraint_rows: list[list[int]] = []
    rhs: list[int] = []
    for row in system.rows:
        coeffs = _integer_row(row)
        constraint_rows.append(coeffs + [1])
        rhs.append(1)
    for i in range(n):
        coeffs = [0] * n
        coeffs[i] = -1
        constraint_rows.append(coeffs + [1])
        rhs.append(1)
    constraint_rows.append([1] * n + [0])
    rhs.append(1)

    m = len(constraint_rows)
    width = n + 1 + m
    table = []
    for k, (coeffs, b) in enumerate(zip(constraint_rows, rhs)):
        slack = [0] * m
        slack[k] = 1
        table.append(coeffs + slack + [b])
    objective = [0] * (width + 1)
    objective[n] = -1  # maximize t
    basis = list(range(n + 1, n + 1 + m))
    det = 1
    threshold = None if stop_above is None else stop_above + 1

    while True:
        if threshold is not None and objective[-1] > threshold * det:
            break
        entering = next((j for j in range(width) if objective[j] < 0), None)
        if entering is None:
            break
        leave = None
        for i in range(m):
            a = table[i][entering]
            if a > 0:
                if leave is None:
                    leave = i
                    continue
                # compare table[i][-1]/a with table[leave][-1]/table[leave][entering]
                lhs = table[i][-1] * table[leave][entering]
                rhs_cmp = table[leave][-1] * a
                if lhs < rhs_cmp or (lhs == rhs_cmp and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            raise AssertionError("margin program is bounded; unbounded ray found")
        pivot_row = table[leave]
        piv = pivot_row[entering]
        for i in range(m):
            if i == leave:
                continue
            row = table[i]
            f = row[entering]
            if f == 0:
                for j in range(width + 1):
                    row[j] = row[j] * piv // det
            else:
                for j in range(width + 1):
                    row[j] = (row[j] * piv - f * pivot_row[j]) // det
        f = objective[entering]
        for j in range(width + 1):
            objective[j] = (objective[j] * piv - f * pivot_row[j]) // det
        det = piv
        basis[leave] = entering

    values = [Fraction(0)] * (n + 1)
    for i, var in enumerate(basis):
        if var <= n:
            values[var] = Fraction(table[i][-1], det)
    margin = values[n] - 1
    return margin, values[:n]


def lp_feasible(system: LinearConstraintSystem) -> bool:
    """True iff the strict system has a solution in the open simplex."""
    return feasible_point(system) is not None


def feasible_point(system: LinearConstraintSystem) -> tuple[Fraction, ...] | None:
    """A normalized exact interior solution, or None if the system is empty."""
    margin, point = maximize_margin(system, stop_above=Fraction(0))
    if margin <= 0:
        return None
    total = sum(point)
    witness = tuple(v / total for v in point)
    assert system.satisfied_by(witness), "simplex returned a non-solution"
    return witness
