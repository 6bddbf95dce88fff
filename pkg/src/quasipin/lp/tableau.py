"""Two-phase primal simplex on an integer-preserving tableau.

The tableau is kept as a matrix of Python integers ``T`` together with a
positive common denominator ``det`` so that the true tableau is ``T / det``.
After every pivot each entry is a minor of the original integer matrix,
which makes the update

    T[i][j] <- (T[i][j] * T[r][k] - T[i][k] * T[r][j]) / det

an exact integer division (Edmonds / Bareiss pivoting). This is several
times faster than carrying ``Fraction`` objects through every cell.

Pivoting follows Bland's rule throughout: the entering column is the lowest
index with negative reduced cost, and ratio-test ties are broken by the
lowest basic variable index. Bland's rule cannot cycle, which matters on
the highly degenerate polytopes this package works with.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class StandardResult:
    """Outcome of ``min c.x  s.t.  A x = b, x >= 0``.

    ``multipliers`` are the simplex multipliers (dual values) of the rows,
    i.e. ``y`` with ``c - A^T y >= 0`` at optimality.
    """

    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    multipliers: tuple[Fraction, ...] | None = None
    pivots: int = 0


def _row_to_int(values):
    den = lcm(*(Fraction(v).denominator for v in values)) if values else 1
    return [int(Fraction(v) * den) for v in values], den


class _Tableau:
    def __init__(self, A, b, c):
        m, n = len(A), len(c)
        self.m, self.n = m, n
        self.row_scale = []
        rows = []
        for i in range(m):
            coeffs = list(A[i]) + [b[i]]
            ints, den = _row_to_int(coeffs)
            sign = -1 if ints[-1] < 0 else 1
            ints = [sign * v for v in ints]
            # stored row = sign * den * original row
            self.row_scale.append(sign * den)
            art = [0] * m
            art[i] = 1
            rows.append(ints[:n] + art + [ints[n]])
        cost, cden = _row_to_int(list(c))
        self.cost_scale = cden
        obj2 = cost + [0] * m + [0]
        obj1 = [0] * (n + m + 1)
        for r in rows:
            for j in range(n):
                obj1[j] -= r[j]
            obj1[-1] -= r[-1]
        self.T = rows + [obj2, obj1]
        self.det = 1
        self.basis = [n + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r, k):
        T, det = self.T, self.det
        prow = T[r]
        p = prow[k]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[k]
            if f == 0:
                if p != det:
                    T[i] = [a * p // det for a in row]
            else:
                T[i] = [(a * p - f * b) // det for a, b in zip(row, prow)]
        self.det = p
        if p < 0:
            self.T = [[-a for a in row] for row in self.T]
            self.det = -p
        self.basis[r] = k
        self.pivots += 1

    def run(self, obj_row, allowed):
        """Bland-rule iterations on ``obj_row``; returns OPTIMAL or UNBOUNDED."""
        T, m = self.T, self.m
        while True:
            obj = T[obj_row]
            k = next((j for j in range(allowed) if obj[j] < 0), None)
            if k is None:
                return OPTIMAL
            best = None
            for i in range(m):
                a = T[i][k]
                if a <= 0:
                    continue
                rhs = T[i][-1]
                if best is None:
                    best = (i, rhs, a)
                    continue
                _, brhs, ba = best
                lhs, rhs_cmp = rhs * ba, brhs * a
                if lhs < rhs_cmp or (lhs == rhs_cmp and self.basis[i] < self.basis[best[0]]):
                    best = (i, rhs, a)
            if best is None:
                return UNBOUNDED
            self.pivot(best[0], k)
            T = self.T

    def drive_out_artificials(self):
        n = self.n
        for i in range(self.m):
            if self.basis[i] < n:
                continue
            row = self.T[i]
            k = next((j for j in range(n) if row[j] != 0), None)
            if k is not None:
                self.pivot(i, k)
            # otherwise the row is redundant; its artificial stays basic at zero


def solve_standard(A, b, c) -> StandardResult:
    """Solve ``min c.x`` subject to ``A x = b`` and ``x >= 0`` exactly.

    ``A`` is a list of rows; entries may be ints or Fractions.
    """
    m, n = len(A), len(c)
    if m == 0:
        if any(Fraction(v) < 0 for v in c):
            return StandardResult(UNBOUNDED)
        return StandardResult(OPTIMAL, tuple(Fraction(0) for _ in range(n)), Fraction(0), ())
    tab = _Tableau(A, b, c)
    obj2, obj1 = m, m + 1
    tab.run(obj1, n)
    if tab.T[obj1][-1] != 0:
        # phase-one optimum is -T[obj1][-1] / det > 0
        return StandardResult(INFEASIBLE, pivots=tab.pivots)
    tab.drive_out_artificials()
    status = tab.run(obj2, n)
    if status == UNBOUNDED:
        return StandardResult(UNBOUNDED, pivots=tab.pivots)
    det = tab.det
    x = [Fraction(0)] * n
    for i, bv in enumerate(tab.basis):
        if bv < n:
            x[bv] = Fraction(tab.T[i][-1], det)
    obj = tab.T[obj2]
    # reduced cost of artificial i is -y_i (scaled); undo row and cost scaling
    mult = tuple(
        Fraction(-obj[n + i], det) * tab.row_scale[i] / tab.cost_scale for i in range(m)
    )
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x) if xi), Fraction(0))
    return StandardResult(OPTIMAL, tuple(x), value, mult, tab.pivots)
