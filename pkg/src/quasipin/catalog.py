"""Generalized Pauli constraint tables and facet-pair notation.

The three d=10 tables are shipped as tab-separated package data in the
printed notation: the coefficient row ``kappa0 .. kappad``, the minimal-pair
cell written as ``{r, d+1-s}`` (with the ``r=0`` and ``d+1-s=d+1`` components
skipped) and the optimal prefactors. The Borland-Dennis setting (3,6) is
defined in code.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .errors import InvalidPair, MalformedEntry, UnknownSetting

__all__ = [
    "Setting", "FacetPair", "GPConstraint", "ConstraintCatalog",
    "KNOWN_SETTINGS", "load_setting", "decode_pair_notation", "encode_pair",
    "parse_pair_cell", "format_pair_cell", "canonical_pair", "candidate_pairs",
    "check_pair", "export_catalog", "catalog_from_table",
]


@dataclass(frozen=True, order=True)
class Setting:
    """Particle number ``N`` and one-particle dimension ``d``."""

    n_particles: int
    dim: int

    def __post_init__(self):
        if not (0 < self.n_particles < self.dim):
            raise ValueError(f"invalid setting (N,d)=({self.n_particles},{self.dim}): need 0 < N < d")

    @property
    def hartree_fock(self) -> tuple[int, ...]:
        return (1,) * self.n_particles + (0,) * (self.dim - self.n_particles)

    def __str__(self):
        return f"({self.n_particles},{self.dim})"

    @classmethod
    def coerce(cls, value) -> "Setting":
        if isinstance(value, Setting):
            return value
        if isinstance(value, str):
            parts = [p for p in re.split(r"[\s,()]+", value) if p]
            if len(parts) != 2:
                raise ValueError(f"cannot parse setting {value!r}")
            return cls(int(parts[0]), int(parts[1]))
        n, d = value
        return cls(int(n), int(d))


@dataclass(frozen=True, order=True)
class FacetPair:
    """Index ``(r, s)`` of the Pauli-simplex facet where the first ``r``
    occupations equal one and the last ``s`` vanish."""

    r: int
    s: int

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise InvalidPair(f"negative pair component in {self}")
        if self.r + self.s == 0:
            raise InvalidPair("pair (0,0) does not index a facet")

    def is_below(self, other: "FacetPair") -> bool:
        """Componentwise ``r <= r'`` and ``s <= s'``: the class order.

        Comparison operators stay lexicographic so pairs sort predictably.
        """
        return self.r <= other.r and self.s <= other.s

    def __str__(self):
        return f"({self.r},{self.s})"

    def as_list(self) -> list[int]:
        return [self.r, self.s]


def check_pair(pair: FacetPair, setting: Setting) -> None:
    if pair.r > setting.n_particles or pair.s > setting.dim - setting.n_particles:
        raise InvalidPair(f"pair {pair} out of range for setting {setting}")


def canonical_pair(pair: FacetPair, setting: Setting) -> FacetPair:
    """Map pairs whose facet collapses to the Hartree-Fock point onto ``(N, d-N)``.

    By normalization, ``r = N`` forces every remaining occupation to zero and
    ``s = d - N`` forces the leading ``N`` occupations to one.
    """
    check_pair(pair, setting)
    n, d = setting.n_particles, setting.dim
    if pair.r == n or pair.s == d - n:
        return FacetPair(n, d - n)
    return pair


def candidate_pairs(setting: Setting) -> list[FacetPair]:
    """All valid pairs ``r <= N``, ``s <= d-N``, ``r+s > 0``, sorted by size.

    For (3,6) only ``r == s`` is meaningful once the three equalities reduce
    the polytope to three dimensions.
    """
    n, d = setting.n_particles, setting.dim
    pairs = [FacetPair(r, s) for r in range(n + 1) for s in range(d - n + 1) if r + s > 0]
    if (n, d) == (3, 6):
        pairs = [p for p in pairs if p.r == p.s]
    return sorted(pairs, key=lambda p: (p.r + p.s, p.r))


@dataclass(frozen=True)
class GPConstraint:
    """One inequality ``kappa0 + sum_i kappa_i * lambda_i >= 0``."""

    setting: Setting
    index: int
    coeffs: tuple[int, ...]
    minimal_pairs: tuple[FacetPair, ...] = ()
    prefactors: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if len(self.coeffs) != self.setting.dim + 1:
            raise ValueError(f"constraint {self.index}: expected {self.setting.dim + 1} coefficients")
        if any(int(k) != k for k in self.coeffs):
            raise ValueError(f"constraint {self.index}: coefficients must be integers")
        if self.minimal_pairs and len(self.prefactors) != len(self.minimal_pairs):
            raise ValueError(f"constraint {self.index}: one prefactor per minimal pair expected")
        if not self.minimal_pairs and len(self.prefactors) > 1:
            raise ValueError(f"constraint {self.index}: empty class carries a single bound")
        if any(c <= 0 for c in self.prefactors):
            raise ValueError(f"constraint {self.index}: prefactors must be positive")
        for a in self.minimal_pairs:
            for b in self.minimal_pairs:
                if a != b and a.is_below(b):
                    raise ValueError(f"constraint {self.index}: minimal pairs {a}, {b} are comparable")

    @property
    def kappa0(self) -> int:
        return self.coeffs[0]

    @property
    def linear(self) -> tuple[int, ...]:
        return self.coeffs[1:]

    @property
    def has_class(self) -> bool:
        return bool(self.minimal_pairs)

    @property
    def scalar_bound(self) -> Fraction | None:
        return None if self.minimal_pairs else (self.prefactors[0] if self.prefactors else None)

    def prefactor_for(self, pair: FacetPair) -> Fraction:
        return self.prefactors[self.minimal_pairs.index(pair)]

    def value_at(self, occupations) -> Fraction:
        """Exact value on integer or rational occupations."""
        return self.coeffs[0] + sum(k * Fraction(v) for k, v in zip(self.coeffs[1:], occupations))


@dataclass(frozen=True)
class ConstraintCatalog:
    setting: Setting
    inequalities: tuple[GPConstraint, ...]
    equalities: tuple[tuple[int, ...], ...] = ()

    def __len__(self):
        return len(self.inequalities)

    def __iter__(self):
        return iter(self.inequalities)

    def __getitem__(self, index: int) -> GPConstraint:
        """1-based access, matching the printed tables."""
        if not 1 <= index <= len(self.inequalities):
            raise KeyError(f"setting {self.setting} has no constraint {index}")
        return self.inequalities[index - 1]

    def replace(self, constraint: GPConstraint) -> "ConstraintCatalog":
        rows = list(self.inequalities)
        rows[constraint.index - 1] = constraint
        return ConstraintCatalog(self.setting, tuple(rows), self.equalities)


def decode_pair_notation(entry, setting: Setting) -> FacetPair:
    """Decode a printed cell ``{a}`` or ``{a, b}`` into ``(r, s)``."""
    setting = Setting.coerce(setting)
    n, d = setting.n_particles, setting.dim
    values = [int(v) for v in entry]
    if not 1 <= len(values) <= 2:
        raise MalformedEntry(f"entry {entry!r} must hold one or two integers")
    if any(not 1 <= v <= d + 1 for v in values):
        raise MalformedEntry(f"entry {entry!r} has values outside 1..{d + 1}")
    if len(values) == 2:
        a, b = values
        if a >= b:
            raise MalformedEntry(f"entry {entry!r} is not strictly increasing")
        r, s = a, d + 1 - b
    else:
        (t,) = values
        r, s = (0, d + 1 - t) if t > n else (t, 0)
    if r > n or s > d - n or r + s == 0:
        raise MalformedEntry(f"entry {entry!r} decodes to ({r},{s}), outside setting {setting}")
    return FacetPair(r, s)


def encode_pair(pair: FacetPair, setting: Setting) -> tuple[int, ...]:
    d = setting.dim
    if pair.r == 0:
        return (d + 1 - pair.s,)
    if pair.s == 0:
        return (pair.r,)
    return (pair.r, d + 1 - pair.s)


_CELL = re.compile(r"\{([^{}]*)\}")


def parse_pair_cell(text: str, setting: Setting) -> tuple[FacetPair, ...]:
    return tuple(
        decode_pair_notation([v for v in re.split(r"[\s,]+", m.group(1)) if v], setting)
        for m in _CELL.finditer(text)
    )


def format_pair_cell(pairs, setting: Setting) -> str:
    return ", ".join("{" + ", ".join(map(str, encode_pair(p, setting))) + "}" for p in pairs)


def _parse_fraction_cell(text: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(v.strip()) for v in text.split(",") if v.strip())


def _split_table(text: str):
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            idx, kappa, pairs, c = line.split("\t")
            rows.append((int(idx), tuple(int(k) for k in kappa.split()), pairs, c))
        except ValueError as exc:
            raise MalformedEntry(f"table line {n}: {exc}") from None
    return rows


def _read_table(setting: Setting):
    name = f"gpc_{setting.n_particles}_{setting.dim}.tsv"
    return _split_table(resources.files("quasipin.data").joinpath(name).read_text())


def catalog_from_table(text: str, setting) -> ConstraintCatalog:
    """Build a catalog from tab-separated text in the shipped table layout.

    Used to check user-edited tables; equalities are not part of the layout.
    """
    setting = Setting.coerce(setting)
    rows = []
    for idx, kappa, pairs, c in _split_table(text):
        try:
            rows.append(GPConstraint(setting, idx, kappa, parse_pair_cell(pairs, setting), _parse_fraction_cell(c)))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedEntry(f"row {idx}: {exc}") from None
    return ConstraintCatalog(setting, tuple(rows))


def _borland_dennis() -> ConstraintCatalog:
    setting = Setting(3, 6)
    inequality = GPConstraint(
        setting, 1, (2, -1, -1, 0, -1, 0, 0),
        minimal_pairs=(FacetPair(1, 1),),
        # not printed in the tables; re-derived exactly by quasipin.lp.derive
        prefactors=(Fraction(1, 2),),
    )
    equalities = (
        (-1, 1, 0, 0, 0, 0, 1),
        (-1, 0, 1, 0, 0, 1, 0),
        (-1, 0, 0, 1, 1, 0, 0),
    )
    return ConstraintCatalog(setting, (inequality,), equalities)


KNOWN_SETTINGS = (Setting(3, 6), Setting(3, 10), Setting(4, 10), Setting(5, 10))


@lru_cache(maxsize=None)
def _load(setting: Setting) -> ConstraintCatalog:
    if setting == Setting(3, 6):
        return _borland_dennis()
    name = f"gpc_{setting.n_particles}_{setting.dim}.tsv"
    return catalog_from_table(resources.files("quasipin.data").joinpath(name).read_text(), setting)


def load_setting(setting) -> ConstraintCatalog:
    """Return the embedded catalog for (3,6), (3,10), (4,10) or (5,10)."""
    try:
        setting = Setting.coerce(setting)
    except ValueError as exc:
        raise UnknownSetting(str(exc)) from None
    if setting not in KNOWN_SETTINGS:
        raise UnknownSetting(f"no constraint table for setting {setting}")
    return _load(setting)


def raw_table_cells(setting) -> list[tuple[int, str, str]]:
    """Printed ``(index, pair cell, prefactor cell)`` strings of a d=10 table."""
    return [(idx, pairs, c) for idx, _, pairs, c in _read_table(Setting.coerce(setting))]


def export_catalog(catalog: ConstraintCatalog) -> str:
    """Line-delimited JSON, one record per constraint; byte-stable."""
    lines = []
    for con in catalog.inequalities:
        record = {
            "index": con.index,
            "kind": "inequality",
            "kappa": list(con.coeffs),
            "pairs": [p.as_list() for p in con.minimal_pairs],
            "c": [str(c) for c in con.prefactors],
        }
        lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")))
    for i, eq in enumerate(catalog.equalities, 1):
        record = {"index": i, "kind": "equality", "kappa": list(eq), "pairs": [], "c": []}
        lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"
