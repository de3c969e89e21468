"""Exact rational LP feasibility via phase-one simplex with Bland's rule."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction


def feasible_point(
    A: Sequence[Sequence[int | Fraction]], b: Sequence[int | Fraction]
) -> list[Fraction] | None:
    """A nonnegative solution of ``A x = b``, or None when none exists.

    Phase one of the tableau simplex: one artificial variable per row, minimise
    their sum.  Bland's rule (lowest index enters, lowest basic index leaves on
    ties) rules out cycling, so the loop terminates.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    rows: list[list[Fraction]] = []
    for i in range(m):
        if len(A[i]) != n:
            raise ValueError("ragged constraint matrix")
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign * a) for a in A[i]]
        row += [Fraction(1) if j == i else Fraction(0) for j in range(m)]
        row.append(Fraction(sign * b[i]))
        rows.append(row)
    width = n + m
    basis = list(range(n, n + m))
    # reduced costs of the phase-one objective sum(artificials)
    cost = [Fraction(0)] * (width + 1)
    for row in rows:
        for j in range(width + 1):
            cost[j] -= row[j]
    for j in range(n, width):
        cost[j] += 1

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i, row in enumerate(rows):
            if row[enter] > 0:
                ratio = row[width] / row[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # unbounded is impossible for phase one
            raise AssertionError("phase-one objective unbounded")
        _pivot(rows, cost, leave, enter)
        basis[leave] = enter

    if -cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rows[i][width]
    return x


def _pivot(rows: list[list[Fraction]], cost: list[Fraction], r: int, c: int) -> None:
    prow = rows[r]
    pv = prow[c]
    if pv != 1:
        rows[r] = prow = [v / pv for v in prow]
    for i, row in enumerate(rows):
        if i != r and row[c]:
            f = row[c]
            rows[i] = [a - f * p for a, p in zip(row, prow)]
    if cost[c]:
        f = cost[c]
        cost[:] = [a - f * p for a, p in zip(cost, prow)]


def convex_combination(
    target: Sequence[int | Fraction], points: Sequence[Sequence[int | Fraction]]
) -> list[Fraction] | None:
    """Weights lambda >= 0 summing to 1 with sum(lambda_i p_i) = target, or None."""
    if not points:
        return None
    dim = len(target)
    A = [[p[k] for p in points] for k in range(dim)]
    A.append([1] * len(points))
    b = list(target) + [1]
    return feasible_point(A, b)
