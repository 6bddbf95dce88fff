"""General-form linear programs over the rationals and their exact solution."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .tableau import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_standard

LE, GE, EQ = "<=", ">=", "=="

__all__ = [
    "LE", "GE", "EQ", "OPTIMAL", "INFEASIBLE", "UNBOUNDED",
    "Row", "LinearProgram", "LPResult", "solve_exact",
]


def _frac_tuple(values):
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class Row:
    """One linear constraint ``coeffs . x  <relation>  rhs``."""

    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction
    name: str | None = None

    def __post_init__(self):
        if self.relation not in (LE, GE, EQ):
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", _frac_tuple(self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def residual(self, x) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x) if a), Fraction(0)) - self.rhs

    def satisfied_by(self, x) -> bool:
        r = self.residual(x)
        return r <= 0 if self.relation == LE else r >= 0 if self.relation == GE else r == 0


@dataclass
class LinearProgram:
    """``sense`` (max or min) of ``objective . x + constant`` subject to rows and bounds.

    ``bounds[i]`` is a ``(lower, upper)`` pair where ``None`` means unbounded on
    that side. When omitted every variable is free.
    """

    objective: Sequence
    rows: list[Row] = field(default_factory=list)
    sense: str = "max"
    bounds: list[tuple] | None = None
    constant: Fraction = Fraction(0)
    names: list[str] | None = None

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"unknown sense {self.sense!r}")
        self.objective = _frac_tuple(self.objective)
        n = len(self.objective)
        if self.bounds is None:
            self.bounds = [(None, None)] * n
        self.bounds = [
            (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
            for lo, hi in self.bounds
        ]
        self.constant = Fraction(self.constant)
        if len(self.bounds) != n:
            raise ValueError("bounds length does not match objective")
        for row in self.rows:
            if len(row.coeffs) != n:
                raise ValueError(f"row {row.name!r} has {len(row.coeffs)} coefficients, expected {n}")
        if self.names is None:
            self.names = [f"x{i + 1}" for i in range(n)]

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def add(self, coeffs, relation, rhs, name=None) -> None:
        self.rows.append(Row(coeffs, relation, rhs, name))

    def evaluate(self, x) -> Fraction:
        return self.constant + sum((c * v for c, v in zip(self.objective, x) if c), Fraction(0))

    def is_feasible(self, x) -> bool:
        for (lo, hi), v in zip(self.bounds, x):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        return all(row.satisfied_by(x) for row in self.rows)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _inequality_form(lp: LinearProgram):
    """Rewrite as ``max c.x`` s.t. ``G x <= h``, ``E x = e`` with x free."""
    c = lp.objective if lp.sense == "max" else tuple(-v for v in lp.objective)
    G, h, E, e = [], [], [], []
    for row in lp.rows:
        if row.relation == LE:
            G.append(row.coeffs)
            h.append(row.rhs)
        elif row.relation == GE:
            G.append(tuple(-a for a in row.coeffs))
            h.append(-row.rhs)
        else:
            E.append(row.coeffs)
            e.append(row.rhs)
    n = lp.n_vars
    for i, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and hi is not None and lo == hi:
            E.append(tuple(Fraction(int(j == i)) for j in range(n)))
            e.append(lo)
            continue
        if lo is not None:
            G.append(tuple(Fraction(-int(j == i)) for j in range(n)))
            h.append(-lo)
        if hi is not None:
            G.append(tuple(Fraction(int(j == i)) for j in range(n)))
            h.append(hi)
    return c, G, h, E, e


def _solve_dual(lp: LinearProgram) -> LPResult:
    # The dual  min h.u + e.v  s.t.  G^T u + E^T v = c, u >= 0, v free  has only
    # n equality rows, so its tableau stays small when the primal has many rows.
    c, G, h, E, e = _inequality_form(lp)
    n = lp.n_vars
    cols = list(G) + list(E) + [tuple(-a for a in row) for row in E]
    cost = list(h) + list(e) + [-v for v in e]
    A = [[col[i] for col in cols] for i in range(n)]
    res = solve_standard(A, list(c), cost)
    if res.status == OPTIMAL:
        x = res.multipliers
        value = lp.evaluate(x)
        return LPResult(OPTIMAL, value, x)
    if res.status == UNBOUNDED:
        return LPResult(INFEASIBLE)
    # dual infeasible: primal is unbounded iff it is feasible (Farkas)
    feas = solve_standard(A, [0] * n, cost)
    return LPResult(UNBOUNDED if feas.status == OPTIMAL else INFEASIBLE)


def _solve_primal(lp: LinearProgram) -> LPResult:
    n = lp.n_vars
    # map each original variable to (offset, [(column, sign)])
    columns = []
    subst = []
    extra_rows = []
    for i, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            subst.append((lo, [(len(columns), 1)]))
            columns.append(i)
            if hi is not None:
                extra_rows.append((len(columns) - 1, hi - lo))
        elif hi is not None:
            subst.append((hi, [(len(columns), -1)]))
            columns.append(i)
        else:
            subst.append((Fraction(0), [(len(columns), 1), (len(columns) + 1, -1)]))
            columns.extend([i, i])
    k = len(columns)
    rows, rhs, rels = [], [], []
    for row in lp.rows:
        coeffs = [Fraction(0)] * k
        shift = Fraction(0)
        for i, a in enumerate(row.coeffs):
            if not a:
                continue
            off, parts = subst[i]
            shift += a * off
            for col, sg in parts:
                coeffs[col] += sg * a
        rows.append(coeffs)
        rhs.append(row.rhs - shift)
        rels.append(row.relation)
    for col, ub in extra_rows:
        coeffs = [Fraction(0)] * k
        coeffs[col] = Fraction(1)
        rows.append(coeffs)
        rhs.append(ub)
        rels.append(LE)
    n_slack = sum(1 for r in rels if r != EQ)
    A = []
    s = 0
    for coeffs, rel in zip(rows, rels):
        slack = [Fraction(0)] * n_slack
        if rel != EQ:
            slack[s] = Fraction(1 if rel == LE else -1)
            s += 1
        A.append(coeffs + slack)
    sign = -1 if lp.sense == "max" else 1
    cost = [Fraction(0)] * (k + n_slack)
    for i, a in enumerate(lp.objective):
        for col, sg in subst[i][1]:
            cost[col] += sign * sg * a
    res = solve_standard(A, rhs, cost)
    if res.status != OPTIMAL:
        return LPResult(res.status)
    x = []
    for off, parts in subst:
        x.append(off + sum((sg * res.x[col] for col, sg in parts), Fraction(0)))
    x = tuple(x)
    return LPResult(OPTIMAL, lp.evaluate(x), x)


def solve_exact(lp: LinearProgram, method: str = "auto") -> LPResult:
    """Solve ``lp`` in exact rational arithmetic.

    Returns an :class:`LPResult` whose status is ``"optimal"``, ``"infeasible"``
    or ``"unbounded"``; the latter two are outcomes, not exceptions. On success
    ``x`` is an optimal basic feasible point and ``value`` the exact optimum.

    ``method`` selects the tableau: ``"primal"`` works on the program itself,
    ``"dual"`` on its dual (small when rows far outnumber variables), and
    ``"auto"`` picks whichever tableau has fewer rows.
    """
    if method == "auto":
        n_rows = len(lp.rows) + sum((lo is not None) + (hi is not None) for lo, hi in lp.bounds)
        method = "dual" if n_rows > lp.n_vars else "primal"
    if method == "dual":
        return _solve_dual(lp)
    if method == "primal":
        return _solve_primal(lp)
    raise ValueError(f"unknown method {method!r}")
