"""Exact re-derivation of constraint classes, minimal pairs and prefactors.

Every program here lives on the polytope ``P`` cut out by the catalog
inequalities, the ordering ``lambda_1 >= ... >= lambda_d >= 0``, the cap
``lambda_1 <= 1`` and the normalization ``sum(lambda) = N`` (plus the three
equalities for (3,6)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from ..catalog import (
    ConstraintCatalog, FacetPair, GPConstraint, Setting, candidate_pairs,
    canonical_pair, check_pair, load_setting,
)
from ..errors import (
    DegeneratePair, NonEmptyClass, SettingMismatch, UnknownConstraint,
    ZeroDenominatorEverywhere,
)
from .program import EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LinearProgram, solve_exact

Recorder = Callable[[str, LinearProgram], None]

__all__ = [
    "ClassResult", "PrefactorResult", "RowReport", "VerifyReport",
    "polytope_rows", "polytope_program", "facet_closure", "class_membership", "derive_minimal_pairs",
    "derive_prefactor", "maximize_constraint", "derive_scalar_bound", "derive_constraint", "verify_catalog",
]


def _resolve(j, catalog: ConstraintCatalog) -> GPConstraint:
    if isinstance(j, GPConstraint):
        if j.setting != catalog.setting:
            raise SettingMismatch(f"constraint from {j.setting} used with catalog {catalog.setting}")
        return j
    try:
        return catalog[int(j)]
    except KeyError as exc:
        raise UnknownConstraint(str(exc)) from None


def polytope_rows(catalog: ConstraintCatalog) -> list[tuple[tuple[int, ...], str, int, str]]:
    """Rows ``(coeffs, relation, rhs, name)`` describing ``P`` in the variables lambda."""
    setting = catalog.setting
    n, d = setting.n_particles, setting.dim
    unit = lambda i: tuple(int(k == i) for k in range(d))
    rows = []
    for con in catalog:
        rows.append((con.linear, GE, -con.kappa0, f"D{con.index}"))
    for k, eq in enumerate(catalog.equalities, 1):
        rows.append((tuple(eq[1:]), EQ, -eq[0], f"E{k}"))
    for i in range(d - 1):
        rows.append((tuple(a - b for a, b in zip(unit(i), unit(i + 1))), GE, 0, f"ord{i + 1}"))
    rows.append((unit(d - 1), GE, 0, "nonneg"))
    rows.append((unit(0), LE, 1, "cap"))
    rows.append(((1,) * d, EQ, n, "norm"))
    return rows


def polytope_program(catalog: ConstraintCatalog, objective, constant=0, sense="max") -> LinearProgram:
    lp = LinearProgram(objective, sense=sense, constant=constant,
                       names=[f"l{i + 1}" for i in range(catalog.setting.dim)])
    for coeffs, rel, rhs, name in polytope_rows(catalog):
        lp.add(coeffs, rel, rhs, name)
    return lp


def _facet_program(con: GPConstraint, catalog: ConstraintCatalog, pair: FacetPair) -> LinearProgram | None:
    """``max D`` over ``P`` restricted to the facet, with the pinned variables
    substituted out. Returns None when a pinned substitution already violates a row."""
    d = catalog.setting.dim
    fixed = {i: 1 for i in range(pair.r)}
    fixed.update({i: 0 for i in range(d - pair.s, d)})
    free = [i for i in range(d) if i not in fixed]
    constant = con.kappa0 + sum(con.linear[i] * v for i, v in fixed.items())
    lp = LinearProgram([con.linear[i] for i in free], constant=constant,
                       names=[f"l{i + 1}" for i in free])
    for coeffs, rel, rhs, name in polytope_rows(catalog):
        shifted = rhs - sum(coeffs[i] * v for i, v in fixed.items())
        reduced = [coeffs[i] for i in free]
        if not any(reduced):
            ok = 0 <= shifted if rel == LE else 0 >= shifted if rel == GE else shifted == 0
            if not ok:
                return None
            continue
        lp.add(reduced, rel, shifted, name)
    return lp


def class_membership(j, pair: FacetPair, catalog: ConstraintCatalog, recorder: Recorder | None = None) -> bool:
    """True iff ``P`` restricted to the facet of ``pair`` lies in the facet of constraint ``j``.

    Raises :class:`DegeneratePair` when the restricted polytope is empty, and
    for (3,6) pairs with ``r != s``.
    """
    con = _resolve(j, catalog)
    setting = catalog.setting
    check_pair(pair, setting)
    if catalog.equalities and pair.r != pair.s:
        raise DegeneratePair(f"pair {pair} is not a facet of the reduced polytope of {setting}")
    lp = _facet_program(con, catalog, pair)
    if lp is None:
        raise DegeneratePair(f"polytope misses the facet of pair {pair}")
    if lp.n_vars == 0:
        return lp.constant == 0
    if recorder:
        recorder(f"membership D{con.index} pair {pair}", lp)
    res = solve_exact(lp)
    if res.status == INFEASIBLE:
        raise DegeneratePair(f"polytope misses the facet of pair {pair}")
    if res.status != OPTIMAL:
        raise RuntimeError(f"unbounded facet program for D{con.index}, pair {pair}")
    return res.value == 0


def _pinned_program(catalog: ConstraintCatalog, objective, r: int, s: int, sense: str) -> LinearProgram:
    d = catalog.setting.dim
    lp = polytope_program(catalog, objective, sense=sense)
    for i in range(r):
        lp.add([int(k == i) for k in range(d)], EQ, 1, f"pin{i + 1}")
    for i in range(d - s, d):
        lp.add([int(k == i) for k in range(d)], EQ, 0, f"pin{i + 1}")
    return lp


def facet_closure(pair: FacetPair, catalog: ConstraintCatalog) -> FacetPair:
    """Largest pair whose facet meets ``P`` in the same set as ``pair``.

    Inside ``P`` pinning some occupations often forces more of them: with
    ``lambda_1 = 1`` in (3,10) the remaining two fermions in nine orbitals
    leave ``lambda_10 = 0``, and ``r = N - 1`` always collapses to the
    Hartree-Fock point. Classes are indexed by these closed pairs.
    """
    setting = catalog.setting
    check_pair(pair, setting)
    return _closures(catalog)[pair]


@lru_cache(maxsize=8)
def _closures(catalog: ConstraintCatalog) -> dict:
    setting = catalog.setting
    n, d = setting.n_particles, setting.dim
    out = {}
    for pair in candidate_pairs(setting):
        r, s = pair.r, pair.s
        changed = True
        while changed and r < n and s < d - n:
            changed = False
            lp = _pinned_program(catalog, [int(k == r) for k in range(d)], r, s, "min")
            if solve_exact(lp).value == 1:
                r, changed = r + 1, True
                continue
            lp = _pinned_program(catalog, [int(k == d - 1 - s) for k in range(d)], r, s, "max")
            if solve_exact(lp).value == 0:
                s, changed = s + 1, True
        out[pair] = canonical_pair(FacetPair(r, s), setting)
    return out


@dataclass(frozen=True)
class ClassResult:
    """Membership of constraint ``index`` in every class and its minimal pairs.

    ``membership`` covers every valid pair. ``minimal_pairs`` are the minimal
    closed pairs (see :func:`facet_closure`) among the members, which is the
    form the shipped tables use.
    """

    setting: Setting
    index: int
    membership: dict
    minimal_pairs: tuple[FacetPair, ...]
    lp_solves: int = 0


def _minimal(pairs: Iterable[FacetPair]) -> tuple[FacetPair, ...]:
    pairs = list(pairs)
    return tuple(sorted(p for p in pairs if not any(q != p and q.is_below(p) for q in pairs)))


def derive_minimal_pairs(j, catalog: ConstraintCatalog, prune: bool = True,
                         recorder: Recorder | None = None) -> ClassResult:
    """Class membership over all pairs and the minimal closed members.

    With ``prune`` one program is solved per distinct facet intersection and
    the class hierarchy fills in the rest (a non-member rules out every
    smaller pair, a member implies every larger one). Without it every pair
    gets its own program.
    """
    con = _resolve(j, catalog)
    setting = catalog.setting
    closure = _closures(catalog)
    solves = 0
    if not prune:
        membership = {}
        for pair in candidate_pairs(setting):
            membership[pair] = class_membership(con, pair, catalog, recorder)
            solves += 1
    else:
        closed = sorted(set(closure.values()), key=lambda p: (-(p.r + p.s), -p.r))
        known: dict[FacetPair, bool] = {}
        # every facet intersection contains the Hartree-Fock point
        if con.value_at(setting.hartree_fock) != 0:
            known = {p: False for p in closed}
        for pair in closed:
            if pair in known:
                continue
            if any(not v and pair.is_below(q) for q, v in known.items()):
                known[pair] = False
            elif any(v and q.is_below(pair) for q, v in known.items()):
                known[pair] = True
            else:
                known[pair] = class_membership(con, pair, catalog, recorder)
                solves += 1
        membership = {p: known[closure[p]] for p in candidate_pairs(setting)}
    minimal = _minimal({closure[p] for p, v in membership.items() if v})
    return ClassResult(setting, con.index, membership, minimal, solves)


@dataclass(frozen=True)
class PrefactorResult:
    """Optimal prefactor with the polytope point attaining it."""

    value: Fraction
    witness: tuple[Fraction, ...]
    branch: str


def _homogenized(catalog: ConstraintCatalog, con: GPConstraint) -> LinearProgram:
    # variables y_1..y_d, t with lambda = y / t
    d = catalog.setting.dim
    lp = LinearProgram(list(con.linear) + [con.kappa0],
                       bounds=[(None, None)] * d + [(0, None)],
                       names=[f"y{i + 1}" for i in range(d)] + ["t"])
    for coeffs, rel, rhs, name in polytope_rows(catalog):
        lp.add(list(coeffs) + [-rhs], rel, 0, name)
    return lp


def _distance_parts(setting: Setting, pair: FacetPair):
    """Homogenized ``A`` and ``B`` as coefficient vectors over ``(y, t)``."""
    d = setting.dim
    a = [Fraction(-1 if i < pair.r else 0) for i in range(d)] + [Fraction(pair.r)]
    b = [Fraction(1 if i >= d - pair.s else 0) for i in range(d)] + [Fraction(0)]
    return a, b


def sigma_distance_exact(occupations, pair: FacetPair) -> Fraction:
    """Exact l1 distance ``2 max(A, B)`` from a rational spectrum to a simplex facet."""
    occ = [Fraction(v) for v in occupations]
    d = len(occ)
    a = sum((1 - v for v in occ[:pair.r]), Fraction(0))
    b = sum(occ[d - pair.s:], Fraction(0))
    return 2 * max(a, b)


def derive_prefactor(j, pair: FacetPair, catalog: ConstraintCatalog,
                     recorder: Recorder | None = None) -> PrefactorResult:
    """Least ``c`` with ``D_j <= c * dist_1(., Sigma_{r,s})`` on ``P``.

    The supremum of ``D / (2 max(A, B))`` is split at ``A = B``; on each side
    the ratio is linear-fractional and becomes an LP after homogenization
    (scale ``t >= 0``, normalize the denominator to one).
    """
    con = _resolve(j, catalog)
    check_pair(pair, catalog.setting)
    a, b = _distance_parts(catalog.setting, pair)
    best = None
    for branch, (big, small) in (("A>=B", (a, b)), ("B>=A", (b, a))):
        if not any(big[:-1]) and not big[-1]:
            continue  # this distance part vanishes identically
        lp = _homogenized(catalog, con)
        lp.add([u - v for u, v in zip(big, small)], GE, 0, "branch")
        lp.add([2 * u for u in big], EQ, 1, "scale")
        if recorder:
            recorder(f"prefactor D{con.index} pair {pair} branch {branch}", lp)
        res = solve_exact(lp)
        if res.status == INFEASIBLE:
            continue
        if res.status == UNBOUNDED:
            raise RuntimeError(f"unbounded ratio program for D{con.index}, pair {pair}")
        t = res.x[-1]
        witness = tuple(v / t for v in res.x[:-1])
        if best is None or res.value > best.value:
            best = PrefactorResult(res.value, witness, branch)
    if best is None:
        raise ZeroDenominatorEverywhere(f"distance to the facet of {pair} vanishes on the polytope")
    return best


def maximize_constraint(j, catalog: ConstraintCatalog, recorder: Recorder | None = None) -> PrefactorResult:
    """Exact maximum of ``D_j`` over ``P`` with a maximizing vertex."""
    con = _resolve(j, catalog)
    lp = polytope_program(catalog, con.linear, constant=con.kappa0)
    if recorder:
        recorder(f"maximum D{con.index}", lp)
    res = solve_exact(lp)
    if not res.optimal:
        raise RuntimeError(f"polytope program for D{con.index} is {res.status}")
    return PrefactorResult(res.value, res.x, "max")


def derive_scalar_bound(j, catalog: ConstraintCatalog, recorder: Recorder | None = None) -> Fraction:
    """Bound ``c`` for a constraint with empty class, ``c = max_P D_j / 2``.

    The factor matches the normalization of the class bounds, where the
    distance ``2 max(A, B)`` carries a 2; every empty-class entry of the
    shipped tables equals half the maximum of ``D_j`` over ``P``.
    """
    con = _resolve(j, catalog)
    if con.value_at(catalog.setting.hartree_fock) == 0:
        raise NonEmptyClass(f"D{con.index} vanishes at the Hartree-Fock point, so its class is not empty")
    return maximize_constraint(con, catalog, recorder).value / 2


@dataclass(frozen=True)
class RowReport:
    index: int
    expected_pairs: tuple[FacetPair, ...]
    derived_pairs: tuple[FacetPair, ...]
    expected_c: tuple[Fraction, ...]
    derived_c: tuple[Fraction, ...]
    witnesses_tight: bool = True

    @property
    def match(self) -> bool:
        return (self.expected_pairs == self.derived_pairs
                and self.expected_c == self.derived_c and self.witnesses_tight)


@dataclass
class VerifyReport:
    setting: Setting
    rows: list[RowReport] = field(default_factory=list)

    @property
    def n_match(self) -> int:
        return sum(r.match for r in self.rows)

    @property
    def mismatches(self) -> list[RowReport]:
        return [r for r in self.rows if not r.match]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def derive_constraint(j, catalog: ConstraintCatalog, recorder: Recorder | None = None):
    """Minimal pairs, prefactors and witness tightness for one constraint."""
    con = _resolve(j, catalog)
    cls = derive_minimal_pairs(con, catalog, recorder=recorder)
    if not cls.minimal_pairs:
        return cls.minimal_pairs, (derive_scalar_bound(con, catalog, recorder),), True
    values, tight = [], True
    for pair in cls.minimal_pairs:
        res = derive_prefactor(con, pair, catalog, recorder)
        values.append(res.value)
        tight &= con.value_at(res.witness) == res.value * sigma_distance_exact(res.witness, pair)
    return cls.minimal_pairs, tuple(values), tight


def verify_catalog(setting, indices: Iterable[int] | None = None, catalog: ConstraintCatalog | None = None,
                   recorder: Recorder | None = None,
                   progress: Callable[[RowReport], None] | None = None) -> VerifyReport:
    """Re-derive every (or the selected) row and diff against the embedded table.

    Pass ``catalog`` to verify a modified copy instead of the shipped data.
    """
    catalog = load_setting(setting) if catalog is None else catalog
    report = VerifyReport(catalog.setting)
    chosen = range(1, len(catalog) + 1) if indices is None else indices
    for idx in chosen:
        con = catalog[idx]
        pairs, values, tight = derive_constraint(con, catalog, recorder)
        row = RowReport(idx, tuple(sorted(con.minimal_pairs)), pairs, _ordered(con), values, tight)
        report.rows.append(row)
        if progress:
            progress(row)
    return report


def _ordered(con: GPConstraint) -> tuple[Fraction, ...]:
    if not con.minimal_pairs:
        return tuple(con.prefactors)
    return tuple(con.prefactor_for(p) for p in sorted(con.minimal_pairs))
