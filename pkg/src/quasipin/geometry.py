"""l1 distances to polytope and simplex facets and the Q-parameter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .catalog import ConstraintCatalog, FacetPair, GPConstraint, load_setting
from .errors import BothZero, DegenerateConstraint, NotInPolytope, SettingMismatch
from .spectra import DEFAULT_TOL, Spectrum, evaluate_gpc, polytope_membership

FINITE, PINNED, INDETERMINATE = "finite", "pinned", "indeterminate"

__all__ = [
    "FINITE", "PINNED", "INDETERMINATE", "kappa_spread", "dist_to_gpc_facet",
    "dist_to_sigma_facet", "ConstraintQ", "QReport", "q_single", "q_entry", "q_overall",
]


def kappa_spread(constraint: GPConstraint) -> int:
    """``max_i kappa_i - min_i kappa_i`` over the linear coefficients."""
    return max(constraint.linear) - min(constraint.linear)


def dist_to_gpc_facet(constraint: GPConstraint, spectrum: Spectrum) -> float:
    """l1 distance ``2 D / spread`` from ``spectrum`` to the hyperplane ``D = 0``.

    Within the normalization hyperplane the nearest point is reached along a
    direction ``e_i - e_j``, so this is the distance to the facet itself only
    when that nearest point lies in the polytope, which holds near the facet.
    """
    spread = kappa_spread(constraint)
    if spread == 0:
        raise DegenerateConstraint(f"D{constraint.index} has equal linear coefficients")
    return 2.0 * evaluate_gpc(constraint, spectrum) / spread


def dist_to_sigma_facet(pair: FacetPair, spectrum: Spectrum) -> float:
    """l1 distance ``2 max(A, B)`` to the Pauli-simplex facet of ``pair``."""
    if pair.r == 0 and pair.s == 0:
        raise BothZero("pair (0,0) has no facet")
    vals = spectrum.values.tolist()
    d = len(vals)
    a = math.fsum(1.0 - v for v in vals[:pair.r])
    b = math.fsum(vals[d - pair.s:])
    return 2.0 * max(a, b)


@dataclass(frozen=True)
class ConstraintQ:
    """Per-constraint piece of a :class:`QReport`.

    ``bounds`` maps each minimal pair to ``c * dist_1``; for an empty class it
    is empty and ``denominator`` is the scalar bound. ``pinned`` means
    ``D <= tol``; such an entry has state ``pinned`` unless its bound vanishes
    too, which makes it ``indeterminate``.
    """

    index: int
    value: float
    facet_distance: float | None
    bounds: dict
    denominator: float
    q: float
    state: str
    empty_class: bool
    pinned: bool


@dataclass(frozen=True)
class QReport:
    spectrum: Spectrum
    entries: list = field(default_factory=list)
    q: float | None = None
    argmax: int | None = None
    d_min: float = math.inf
    d_min_index: int | None = None

    @property
    def pinned(self) -> list:
        return [e.index for e in self.entries if e.pinned]

    @property
    def indeterminate(self) -> list:
        return [e.index for e in self.entries if e.state == INDETERMINATE]

    def entry(self, index: int) -> ConstraintQ:
        return next(e for e in self.entries if e.index == index)


def _check_member(spectrum: Spectrum, catalog: ConstraintCatalog, tol: float) -> None:
    report = polytope_membership(spectrum, catalog, tol)
    if not report.member:
        worst = min(report.violations, key=lambda v: v.value if v.kind == "inequality" else -abs(v.value))
        raise NotInPolytope(f"spectrum violates {len(report.violations)} constraint(s), "
                            f"e.g. {worst.kind} {worst.index} = {worst.value!r}", report.violations)


def q_entry(constraint: GPConstraint, spectrum: Spectrum, tol: float = DEFAULT_TOL) -> ConstraintQ:
    """Q-parameter of one constraint without the polytope check."""
    if constraint.setting != spectrum.setting:
        raise SettingMismatch(f"constraint of {constraint.setting} applied to a {spectrum.setting} spectrum")
    value = evaluate_gpc(constraint, spectrum)
    spread = kappa_spread(constraint)
    facet = 2.0 * value / spread if spread else None
    bounds = {}
    if constraint.minimal_pairs:
        for pair, c in zip(constraint.minimal_pairs, constraint.prefactors):
            bounds[pair] = float(c) * dist_to_sigma_facet(pair, spectrum)
        denominator = max(bounds.values())
    else:
        denominator = float(constraint.prefactors[0])
    small = value <= tol
    if small and denominator <= tol:
        # lambda sits on the simplex facet itself: 0/0
        state, q = INDETERMINATE, math.nan
    elif small:
        state, q = PINNED, math.inf
    elif denominator <= tol:
        state, q = INDETERMINATE, math.nan
    else:
        state, q = FINITE, -math.log10(value / denominator)
    return ConstraintQ(constraint.index, value, facet, bounds, denominator, q, state,
                       not constraint.minimal_pairs, small)


def q_single(constraint: GPConstraint, spectrum: Spectrum, catalog: ConstraintCatalog | None = None,
             tol: float = DEFAULT_TOL) -> float:
    """``Q_j = -log10(D_j / bound)``; ``inf`` when pinned, ``nan`` when indeterminate.

    The bound is the largest ``c * dist_1(lambda, Sigma_{r,s})`` over the
    minimal pairs, or the scalar bound for a constraint with empty class.
    Raises :class:`NotInPolytope` unless the spectrum lies in the polytope
    of ``catalog`` (by default the embedded catalog of the setting).
    """
    catalog = load_setting(constraint.setting) if catalog is None else catalog
    _check_member(spectrum, catalog, tol)
    return q_entry(constraint, spectrum, tol).q


def q_overall(spectrum: Spectrum, catalog: ConstraintCatalog | None = None,
              tol: float = DEFAULT_TOL) -> QReport:
    """All ``Q_j`` with ``Q = max`` over the finite ones (ties to the lowest index)."""
    catalog = load_setting(spectrum.setting) if catalog is None else catalog
    _check_member(spectrum, catalog, tol)
    entries = [q_entry(con, spectrum, tol) for con in catalog]
    best = None
    for e in entries:
        if e.state == FINITE and (best is None or e.q > best.q):
            best = e
    low = min(entries, key=lambda e: e.value) if entries else None
    return QReport(
        spectrum, entries,
        q=best.q if best else None, argmax=best.index if best else None,
        d_min=low.value if low else math.inf, d_min_index=low.index if low else None,
    )
