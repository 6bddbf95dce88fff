"""Truncation of spectra to smaller settings and extensions of constraints.

Freezing the first ``dN`` occupations at one and the last ``dd - dN`` at
zero maps a setting ``(N, d)`` onto ``(N - dN, d - dd)``; the polytope of the
smaller setting is the slice of the larger one. A nearly saturated spectrum
can therefore be analysed in the smaller setting, at the price of an error
controlled by the neglected deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .catalog import (
    KNOWN_SETTINGS, ConstraintCatalog, FacetPair, GPConstraint, Setting, candidate_pairs,
    load_setting,
)
from .errors import (
    DegeneratePair, ExcessiveTruncationError, IncompatibleSettings, InvalidSlice,
    NoFeasiblePlan, SettingMismatch,
)
from .lp.derive import class_membership, derive_minimal_pairs, derive_prefactor
from .spectra import DEFAULT_TOL, Spectrum

__all__ = [
    "TruncationPlan", "TruncationResult", "truncate", "auto_truncate", "restrict_coeffs",
    "find_extension", "class_shift", "prefactor_chain", "max_abs_kappa",
]


@dataclass(frozen=True)
class TruncationPlan:
    """Freeze ``delta_n`` leading and ``delta_d - delta_n`` trailing occupations."""

    source: Setting
    delta_n: int
    delta_d: int

    def __post_init__(self):
        object.__setattr__(self, "source", Setting.coerce(self.source))
        if self.delta_n < 0 or self.delta_d < self.delta_n:
            raise ValueError(f"need 0 <= delta_n <= delta_d, got ({self.delta_n}, {self.delta_d})")
        n, d = self.source.n_particles - self.delta_n, self.source.dim - self.delta_d
        if not 0 < n < d:
            raise ValueError(f"plan leaves an invalid setting (N',d')=({n},{d})")

    @property
    def target(self) -> Setting:
        return Setting(self.source.n_particles - self.delta_n, self.source.dim - self.delta_d)

    @property
    def n_zeros(self) -> int:
        return self.delta_d - self.delta_n

    @property
    def kept(self) -> slice:
        return slice(self.delta_n, self.source.dim - self.n_zeros)

    @classmethod
    def between(cls, source, target) -> "TruncationPlan":
        source, target = Setting.coerce(source), Setting.coerce(target)
        dn = source.n_particles - target.n_particles
        dd = source.dim - target.dim
        if dn < 0 or dd < dn:
            raise IncompatibleSettings(f"{target} is not a truncation of {source}")
        return cls(source, dn, dd)

    def __str__(self):
        return f"{self.source}->{self.target} (dN={self.delta_n}, dd={self.delta_d})"


@dataclass(frozen=True)
class TruncationResult:
    plan: TruncationPlan
    spectrum: Spectrum
    error_bound: float


def _error_bound(values, plan: TruncationPlan) -> float:
    vals = list(values)
    head = [1.0 - v for v in vals[:plan.delta_n]]
    tail = vals[plan.source.dim - plan.n_zeros:]
    return math.fsum(head + tail)


def truncate(spectrum: Spectrum, plan: TruncationPlan, budget: float | None = None,
             tol: float = DEFAULT_TOL) -> TruncationResult:
    """Keep the middle slice of ``spectrum`` without renormalizing it.

    ``error_bound`` is the l1 mass of the neglected deviations,
    ``sum_{i<=dN} (1 - lambda_i) + sum of the dropped tail``.
    """
    if spectrum.setting != plan.source:
        raise SettingMismatch(f"plan for {plan.source} applied to a {spectrum.setting} spectrum")
    err = _error_bound(spectrum.values.tolist(), plan)
    if budget is not None and err > budget:
        raise ExcessiveTruncationError(f"truncation error {err!r} exceeds budget {budget!r}")
    kept = spectrum.values[plan.kept]
    slack = tol + err
    total = math.fsum(kept.tolist())
    if abs(total - plan.target.n_particles) > slack:
        raise InvalidSlice(f"kept occupations sum to {total!r}, target needs {plan.target.n_particles}")
    if kept.size and (kept.max() > 1 + slack or kept.min() < -slack):
        raise InvalidSlice("kept occupations leave [0, 1]")
    return TruncationResult(plan, Spectrum(plan.target, kept), err)


def auto_truncate(spectrum: Spectrum, budget: float, tol: float = DEFAULT_TOL,
                  targets=KNOWN_SETTINGS) -> TruncationResult:
    """Truncate to the smallest catalog setting within ``budget``.

    Candidates are ranked by target dimension, then error bound, then by
    preferring more particles, so equally small targets keep the most
    information.
    """
    options = []
    for target in targets:
        try:
            plan = TruncationPlan.between(spectrum.setting, target)
            result = truncate(spectrum, plan, budget, tol)
        except (IncompatibleSettings, ExcessiveTruncationError, InvalidSlice, ValueError):
            continue
        options.append(((target.dim, result.error_bound, -target.n_particles), result))
    if not options:
        raise NoFeasiblePlan(f"no catalog setting reachable from {spectrum.setting} within budget {budget!r}")
    return min(options, key=lambda o: o[0])[1]


def restrict_coeffs(constraint: GPConstraint, plan: TruncationPlan) -> tuple[int, ...]:
    """Coefficients of ``D(1,...,1, lambda', 0,...,0)`` as a function of ``lambda'``."""
    k = constraint.coeffs
    head = sum(k[1:plan.delta_n + 1])
    middle = k[plan.delta_n + 1:plan.source.dim - plan.n_zeros + 1]
    return (k[0] + head,) + tuple(middle)


def find_extension(small: GPConstraint, big_catalog: ConstraintCatalog) -> list[GPConstraint]:
    """Constraints of the larger setting whose restriction equals ``small`` exactly."""
    plan = TruncationPlan.between(big_catalog.setting, small.setting)
    return [con for con in big_catalog if restrict_coeffs(con, plan) == tuple(small.coeffs)]


def class_shift(small: GPConstraint, big: GPConstraint, small_catalog: ConstraintCatalog | None = None,
                big_catalog: ConstraintCatalog | None = None) -> dict:
    """Membership of ``small`` in ``C'_{r,s}`` next to that of ``big`` in the shifted class.

    Returns ``{(r, s): (small member, big member)}`` over the pairs of the
    smaller setting; the extension relation predicts equal entries.
    """
    small_catalog = load_setting(small.setting) if small_catalog is None else small_catalog
    big_catalog = load_setting(big.setting) if big_catalog is None else big_catalog
    plan = TruncationPlan.between(big.setting, small.setting)
    out = {}
    for pair in candidate_pairs(small.setting):
        try:
            mine = class_membership(small, pair, small_catalog)
        except DegeneratePair:
            continue
        shifted = FacetPair(pair.r + plan.delta_n, pair.s + plan.n_zeros)
        out[pair] = (mine, class_membership(big, shifted, big_catalog))
    return out


def prefactor_chain(small: GPConstraint, big: GPConstraint, small_catalog: ConstraintCatalog | None = None,
                    big_catalog: ConstraintCatalog | None = None) -> list[tuple[FacetPair, Fraction, Fraction]]:
    """``(pair', c', c)`` for each minimal pair of ``small``: its optimal
    prefactor and that of ``big`` at the shifted pair, both exact."""
    small_catalog = load_setting(small.setting) if small_catalog is None else small_catalog
    big_catalog = load_setting(big.setting) if big_catalog is None else big_catalog
    plan = TruncationPlan.between(big.setting, small.setting)
    out = []
    for pair in derive_minimal_pairs(small, small_catalog).minimal_pairs:
        shifted = FacetPair(pair.r + plan.delta_n, pair.s + plan.n_zeros)
        c_small = derive_prefactor(small, pair, small_catalog).value
        c_big = derive_prefactor(big, shifted, big_catalog).value
        out.append((pair, c_small, c_big))
    return out


def max_abs_kappa(constraint: GPConstraint) -> int:
    """Largest linear coefficient magnitude; scales the error bound into a bound on D."""
    return max(abs(k) for k in constraint.linear)

