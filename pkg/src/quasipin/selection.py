"""Slater-determinant selection rules, one-particle density matrices and
weight decompositions of configuration-interaction states.

Sign convention: a configuration ``(i_1 < ... < i_N)`` stands for
``a+_{i_1} ... a+_{i_N} |0>`` with creation operators in ascending order,
and ``rho[p, q] = <Psi| a+_q a_p |Psi>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .catalog import ConstraintCatalog, FacetPair, GPConstraint, Setting, check_pair, load_setting
from .errors import (
    ImpossibleActiveSpace, InvalidPair, NotAligned, NotNormalized, PairNotInClass,
    SettingMismatch, StateError,
)
from .lp.derive import facet_closure
from .spectra import DEFAULT_TOL, Spectrum, validate_spectrum

__all__ = [
    "Configuration", "CIState", "pinned_configurations", "pc_configurations", "one_rdm",
    "natural_occupations", "pair_in_class", "WeightDecomposition", "weight_decomposition",
]


@dataclass(frozen=True, order=True)
class Configuration:
    """Sorted 1-based occupied orbitals of a Slater determinant."""

    orbitals: tuple[int, ...]

    def __post_init__(self):
        orbs = tuple(int(i) for i in self.orbitals)
        if len(set(orbs)) != len(orbs):
            raise StateError(f"repeated orbital in {orbs}")
        if any(i < 1 for i in orbs):
            raise StateError(f"orbital indices start at 1: {orbs}")
        object.__setattr__(self, "orbitals", tuple(sorted(orbs)))

    @property
    def mask(self) -> int:
        return sum(1 << (i - 1) for i in self.orbitals)

    def occupation(self, dim: int) -> tuple[int, ...]:
        return tuple(int(i + 1 in self.orbitals) for i in range(dim))

    def __str__(self):
        return "{" + ",".join(map(str, self.orbitals)) + "}"


def _as_config(value) -> Configuration:
    return value if isinstance(value, Configuration) else Configuration(tuple(value))


class CIState:
    """Configuration-interaction expansion ``sum_i c_i |i>`` of an N-fermion state."""

    def __init__(self, setting, amplitudes: Mapping | Iterable):
        self.setting = Setting.coerce(setting)
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[Configuration, complex] = {}
        n, d = self.setting.n_particles, self.setting.dim
        for key, c in items:
            conf = _as_config(key)
            if len(conf.orbitals) != n or conf.orbitals[-1] > d:
                raise StateError(f"configuration {conf} does not fit setting {self.setting}")
            if conf in amps:
                raise StateError(f"duplicate configuration {conf}")
            amps[conf] = complex(c)
        self.amplitudes = amps

    @classmethod
    def from_records(cls, setting, records: Iterable[Mapping]) -> "CIState":
        """Build from ``{"occupied": [...], "re": x, "im": y}`` records."""
        pairs = []
        for rec in records:
            try:
                pairs.append((tuple(rec["occupied"]), complex(float(rec["re"]), float(rec.get("im", 0.0)))))
            except (KeyError, TypeError, ValueError) as exc:
                raise StateError(f"malformed state record {rec!r}: {exc}") from None
        return cls(setting, pairs)

    def norm_squared(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.amplitudes.values())

    def __repr__(self):
        return f"CIState({self.setting}, {len(self.amplitudes)} configurations)"


def pinned_configurations(constraint: GPConstraint, setting=None) -> set[Configuration]:
    """Configurations annihilated by ``D = kappa0 + sum kappa_i n_i`` (exact integers)."""
    if setting is not None and Setting.coerce(setting) != constraint.setting:
        raise SettingMismatch(f"constraint of {constraint.setting} used with setting {setting}")
    s = constraint.setting
    k0, kappa = constraint.kappa0, constraint.linear
    return {
        Configuration(orbs)
        for orbs in combinations(range(1, s.dim + 1), s.n_particles)
        if k0 + sum(kappa[i - 1] for i in orbs) == 0
    }


def pc_configurations(pair: FacetPair, setting) -> set[Configuration]:
    """Configurations holding orbitals ``1..r`` and none of the last ``s``."""
    setting = Setting.coerce(setting)
    n, d = setting.n_particles, setting.dim
    if pair.r > n:
        raise InvalidPair(f"pair {pair} freezes more than {n} orbitals")
    if n - pair.r > d - pair.r - pair.s:
        raise ImpossibleActiveSpace(f"{n - pair.r} fermions do not fit into {d - pair.r - pair.s} active orbitals")
    frozen = tuple(range(1, pair.r + 1))
    active = range(pair.r + 1, d - pair.s + 1)
    return {Configuration(frozen + rest) for rest in combinations(active, n - pair.r)}


def _hop_sign(mask: int, p: int, q: int) -> int:
    # parity of occupied orbitals strictly between p and q (0-based bits)
    lo, hi = min(p, q), max(p, q)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1 if bin(between).count("1") % 2 else 1


def one_rdm(state: CIState, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``rho[p, q] = <Psi| a+_q a_p |Psi>`` as a d x d complex matrix (0-based)."""
    norm = state.norm_squared()
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state has squared norm {norm!r}")
    d = state.setting.dim
    by_mask = {conf.mask: c for conf, c in state.amplitudes.items()}
    rho = np.zeros((d, d), dtype=complex)
    for mask, c in by_mask.items():
        occ = [i for i in range(d) if mask >> i & 1]
        for p in occ:
            rho[p, p] += abs(c) ** 2
            rest = mask & ~(1 << p)
            for q in range(d):
                if rest >> q & 1 or q == p:
                    continue
                target = by_mask.get(rest | (1 << q))
                if target is not None:
                    rho[p, q] += _hop_sign(mask, p, q) * c * target.conjugate()
    return rho


def natural_occupations(state: CIState, tol: float = DEFAULT_TOL) -> tuple[Spectrum, bool]:
    """Decreasing eigenvalues of the 1RDM and whether it was already diagonal."""
    rho = one_rdm(state, tol)
    offdiag = rho - np.diag(np.diag(rho))
    aligned = bool(np.max(np.abs(offdiag), initial=0.0) <= tol)
    if aligned:
        eig = np.sort(np.real(np.diag(rho)))[::-1]
    else:
        eig = np.sort(np.linalg.eigvalsh(rho))[::-1]
    return validate_spectrum(eig, state.setting, tol), aligned


def pair_in_class(constraint: GPConstraint, pair: FacetPair, catalog: ConstraintCatalog | None = None) -> bool:
    """Membership of ``constraint`` in the class of ``pair`` from its tabulated minimal pairs."""
    catalog = load_setting(constraint.setting) if catalog is None else catalog
    check_pair(pair, constraint.setting)
    if not constraint.minimal_pairs:
        return False
    closed = facet_closure(pair, catalog)
    return any(m.is_below(closed) for m in constraint.minimal_pairs)


@dataclass(frozen=True)
class WeightDecomposition:
    """Squared norms of the state on ``I_S``, ``I_D \\ I_S`` and the rest.

    ``inclusion`` records whether ``I_S`` lies inside ``I_D`` as sets of
    configurations; when it does not, ``w_s_outside_d`` is the part of
    ``w_s`` carried by configurations outside ``I_D``.
    """

    w_s: float
    w_d_minus_s: float
    w_r: float
    inclusion: bool
    w_s_outside_d: float

    def __iter__(self):
        return iter((self.w_s, self.w_d_minus_s, self.w_r))


def weight_decomposition(state: CIState, constraint: GPConstraint, pair: FacetPair,
                         catalog: ConstraintCatalog | None = None,
                         tol: float = DEFAULT_TOL) -> WeightDecomposition:
    """Split ``|Psi|^2`` over the Pauli and generalized-Pauli selection sets.

    The state must already be written in its natural orbitals, ordered by
    decreasing occupation: the 1RDM must be diagonal with a non-increasing
    diagonal within ``tol``.
    """
    if state.setting != constraint.setting:
        raise SettingMismatch(f"state of {state.setting} with constraint of {constraint.setting}")
    if not pair_in_class(constraint, pair, catalog):
        raise PairNotInClass(f"D{constraint.index} is not in the class of pair {pair}")
    rho = one_rdm(state, tol)
    diag = np.real(np.diag(rho))
    offdiag = rho - np.diag(np.diag(rho))
    if np.max(np.abs(offdiag), initial=0.0) > tol or np.any(np.diff(diag) > tol):
        raise NotAligned("state is not expressed in its decreasingly ordered natural orbitals")
    i_d = pinned_configurations(constraint)
    i_s = pc_configurations(pair, state.setting)
    w_s, w_ds, w_r, w_out = [], [], [], []
    for conf, c in state.amplitudes.items():
        w = abs(c) ** 2
        if conf in i_s:
            w_s.append(w)
            if conf not in i_d:
                w_out.append(w)
        elif conf in i_d:
            w_ds.append(w)
        else:
            w_r.append(w)
    return WeightDecomposition(math.fsum(w_s), math.fsum(w_ds), math.fsum(w_r),
                               i_s <= i_d, math.fsum(w_out))
