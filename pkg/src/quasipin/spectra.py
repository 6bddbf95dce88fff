"""Validated occupation spectra and evaluation of constraint functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import ConstraintCatalog, FacetPair, GPConstraint, Setting, check_pair
from .errors import (
    InvalidPair, NotNormalized, NotOrdered, OutOfRange, SettingMismatch, WrongLength,
)

DEFAULT_TOL = 1e-10

__all__ = [
    "DEFAULT_TOL", "Spectrum", "Violation", "MembershipReport", "validate_spectrum",
    "infer_setting", "evaluate_gpc", "evaluate_pc", "polytope_membership",
]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Decreasingly ordered natural occupation numbers of a setting.

    Build instances through :func:`validate_spectrum`; ``values`` is a
    read-only float array.
    """

    setting: Setting
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        return (isinstance(other, Spectrum) and self.setting == other.setting
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"Spectrum({self.setting}, {self.values.tolist()})"


def validate_spectrum(raw, setting, tol: float = DEFAULT_TOL) -> Spectrum:
    """Check a raw occupation vector and return it as a :class:`Spectrum`.

    The sum must match ``N`` within ``tol`` before any clamping; entries
    within ``tol`` of 0 or 1 are then clamped onto the bound. The clamped
    vector is re-sorted only when every ordering violation is smaller than
    ``tol`` (tie repair); larger violations raise :class:`NotOrdered`.
    """
    setting = Setting.coerce(setting)
    if tol <= 0:
        raise ValueError("tol must be positive")
    values = np.asarray(raw, dtype=float).ravel()
    if values.size != setting.dim:
        raise WrongLength(f"expected {setting.dim} occupations for {setting}, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise OutOfRange("occupations must be finite numbers")
    bad = np.flatnonzero((values < -tol) | (values > 1 + tol))
    if bad.size:
        i = int(bad[0])
        raise OutOfRange(f"lambda_{i + 1} = {values[i]!r} lies outside [0, 1]")
    # normalization is judged before clamping, which may move the sum by up to d * tol
    total = math.fsum(values.tolist())
    if abs(total - setting.n_particles) > tol:
        raise NotNormalized(f"occupations sum to {total!r}, expected {setting.n_particles}")
    values = values.copy()
    values[np.abs(values) <= tol] = 0.0
    values[np.abs(values - 1.0) <= tol] = 1.0
    rises = np.diff(values)
    if rises.size and rises.max() > tol:
        i = int(np.argmax(rises))
        raise NotOrdered(f"lambda_{i + 1} = {values[i]!r} < lambda_{i + 2} = {values[i + 1]!r}")
    if rises.size and rises.max() > 0:
        values = np.sort(values)[::-1]
    return Spectrum(setting, values)


def infer_setting(raw, tol: float = DEFAULT_TOL) -> Setting:
    """``(round(sum), len)`` of a raw vector, rejecting non-integral sums."""
    values = np.asarray(raw, dtype=float).ravel()
    total = math.fsum(values)
    n = round(total)
    if abs(total - n) > tol:
        raise NotNormalized(f"occupations sum to {total!r}, not an integer particle number")
    try:
        return Setting(int(n), values.size)
    except ValueError as exc:
        raise NotNormalized(str(exc)) from None


def _affine(coeffs, values) -> float:
    # integer kappa: repeat each term |kappa| times so no product is rounded
    # and fsum returns the correctly rounded value
    terms = [float(coeffs[0])]
    for k, v in zip(coeffs[1:], values):
        terms.extend([v if k > 0 else -v] * abs(int(k)))
    return math.fsum(terms)


def evaluate_gpc(constraint: GPConstraint, spectrum: Spectrum) -> float:
    """``D_j(lambda)`` with compensated summation."""
    if constraint.setting != spectrum.setting:
        raise SettingMismatch(f"constraint of {constraint.setting} applied to a {spectrum.setting} spectrum")
    return _affine(constraint.coeffs, spectrum.values.tolist())


def evaluate_pc(pair: FacetPair, spectrum: Spectrum) -> float:
    """Pauli functional ``S_{r,s} = sum_{i<=r} (1 - lambda_i) + sum_{j>d-s} lambda_j``."""
    try:
        check_pair(pair, spectrum.setting)
    except InvalidPair as exc:
        raise SettingMismatch(str(exc)) from None
    vals = spectrum.values.tolist()
    d = len(vals)
    return math.fsum([1.0 - v for v in vals[:pair.r]] + vals[d - pair.s:])


@dataclass(frozen=True)
class Violation:
    kind: str  # "inequality" or "equality"
    index: int
    value: float


@dataclass(frozen=True)
class MembershipReport:
    violations: list = field(default_factory=list)

    @property
    def member(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.member


def polytope_membership(spectrum: Spectrum, catalog: ConstraintCatalog,
                        tol: float = DEFAULT_TOL) -> MembershipReport:
    """List catalog inequalities below ``-tol`` and equalities off by more than ``tol``.

    Ordering, bounds and normalization are already guaranteed by validation.
    """
    if catalog.setting != spectrum.setting:
        raise SettingMismatch(f"catalog of {catalog.setting} applied to a {spectrum.setting} spectrum")
    vals = spectrum.values.tolist()
    violations = []
    for con in catalog:
        v = _affine(con.coeffs, vals)
        if v < -tol:
            violations.append(Violation("inequality", con.index, v))
    for k, eq in enumerate(catalog.equalities, 1):
        v = _affine(eq, vals)
        if abs(v) > tol:
            violations.append(Violation("equality", k, v))
    return MembershipReport(violations)
