from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasipin.catalog import FacetPair, Setting, candidate_pairs, load_setting
from quasipin.errors import (
    ImpossibleActiveSpace, InvalidPair, NotAligned, NotNormalized, PairNotInClass, SettingMismatch,
    StateError,
)
from quasipin.lp.derive import derive_minimal_pairs
from quasipin.selection import (
    CIState, Configuration, natural_occupations, one_rdm, pair_in_class, pc_configurations,
    pinned_configurations, weight_decomposition,
)
from quasipin.spectra import evaluate_gpc

S36, S310 = Setting(3, 6), Setting(3, 10)
BD = load_setting(S36)
C310 = load_setting(S310)


# Jordan-Wigner oracle on Fock-space dictionaries {mask: amplitude}

def _annihilate(state, j):
    out = {}
    for mask, c in state.items():
        if mask >> j & 1:
            sign = -1 if bin(mask & ((1 << j) - 1)).count("1") % 2 else 1
            out[mask ^ (1 << j)] = out.get(mask ^ (1 << j), 0) + sign * c
    return out


def _create(state, j):
    out = {}
    for mask, c in state.items():
        if not mask >> j & 1:
            sign = -1 if bin(mask & ((1 << j) - 1)).count("1") % 2 else 1
            out[mask | (1 << j)] = out.get(mask | (1 << j), 0) + sign * c
    return out


def _fock(state: CIState):
    total = {}
    for conf, c in state.amplitudes.items():
        vec = {0: c}
        for i in reversed(conf.orbitals):  # a+_{i1} ... a+_{iN} |0>
            vec = _create(vec, i - 1)
        for m, v in vec.items():
            total[m] = total.get(m, 0) + v
    return total


def _oracle_rdm(state: CIState):
    d = state.setting.dim
    psi = _fock(state)
    lowered = [_annihilate(psi, p) for p in range(d)]
    rho = np.zeros((d, d), dtype=complex)
    for p in range(d):
        for q in range(d):
            # <psi| a+_q a_p |psi> = <a_q psi | a_p psi>
            rho[p, q] = sum(np.conj(v) * lowered[p].get(m, 0) for m, v in lowered[q].items())
    return rho


@st.composite
def ci_states(draw, setting=S310, max_terms=6):
    confs = list(combinations(range(1, setting.dim + 1), setting.n_particles))
    chosen = draw(st.lists(st.sampled_from(confs), min_size=1, max_size=max_terms, unique=True))
    amps = np.array([complex(draw(st.floats(-1, 1)), draw(st.floats(-1, 1))) for _ in chosen])
    if np.linalg.norm(amps) < 1e-3:
        amps = np.ones(len(chosen), dtype=complex)
    amps /= np.linalg.norm(amps)
    return CIState(setting, dict(zip(chosen, amps)))


def test_two_determinant_example():
    a, b = 0.6, 0.8j
    rho = one_rdm(CIState(S36, {(1, 2, 3): a, (1, 2, 4): b}))
    assert rho[2, 3] == pytest.approx(a * np.conj(b))
    assert rho[3, 2] == pytest.approx(np.conj(a) * b)
    assert np.allclose(np.diag(rho).real, [1, 1, .36, .64, 0, 0])


def test_sign_from_intermediate_orbitals():
    # |135> + |345>: moving 1 -> 4 passes over orbital 3
    s = 1 / np.sqrt(2)
    state = CIState(S36, {(1, 3, 5): s, (3, 4, 5): s})
    rho = one_rdm(state)
    assert rho[0, 3] == pytest.approx(np.conj(s) * s * -1)
    assert np.allclose(rho, _oracle_rdm(state))


@settings(max_examples=150, deadline=None)
@given(ci_states())
def test_one_rdm_matches_jordan_wigner(state):
    rho = one_rdm(state)
    assert np.allclose(rho, _oracle_rdm(state), atol=1e-12)
    assert np.allclose(rho, rho.conj().T, atol=1e-14)
    assert np.trace(rho).real == pytest.approx(3)
    eig = np.linalg.eigvalsh(rho)
    assert eig.min() > -1e-12 and eig.max() < 1 + 1e-12


def test_state_validation():
    with pytest.raises(StateError):
        CIState(S36, [((1, 2, 3), 1), ((3, 2, 1), 0)])
    with pytest.raises(StateError):
        CIState(S36, {(1, 2, 7): 1})
    with pytest.raises(StateError):
        CIState(S36, {(1, 1, 2): 1})
    with pytest.raises(NotNormalized):
        one_rdm(CIState(S36, {(1, 2, 3): 0.5}))
    state = CIState.from_records(S36, [{"occupied": [1, 2, 3], "re": 0.6}, {"occupied": [1, 2, 4], "im": 0.8,
                                                                             "re": 0}])
    assert state.norm_squared() == pytest.approx(1)


def test_pinned_configurations_of_borland_dennis():
    confs = pinned_configurations(BD[1])
    assert len(confs) == 9
    assert Configuration((1, 2, 3)) in confs and Configuration((2, 4, 6)) in confs
    for conf in confs:
        assert BD[1].value_at(conf.occupation(6)) == 0
    with pytest.raises(SettingMismatch):
        pinned_configurations(BD[1], S310)


def test_pauli_configurations():
    assert len(pc_configurations(FacetPair(1, 1), S36)) == 6
    confs = pc_configurations(FacetPair(1, 3), S310)
    assert len(confs) == 15
    assert all(c.orbitals[0] == 1 and max(c.orbitals) <= 7 for c in confs)
    assert pc_configurations(FacetPair(3, 7), S310) == {Configuration((1, 2, 3))}
    with pytest.raises(InvalidPair):
        pc_configurations(FacetPair(4, 0), S310)
    with pytest.raises(ImpossibleActiveSpace):
        pc_configurations(FacetPair(0, 8), S310)


def test_pauli_set_is_not_inside_pinned_set():
    # I_S holds determinants on which D is nonzero; they cannot carry weight
    # in a state that saturates both the Pauli constraint and D.
    i_s, i_d = pc_configurations(FacetPair(1, 1), S36), pinned_configurations(BD[1])
    assert Configuration((1, 2, 4)) in i_s - i_d
    assert BD[1].value_at(Configuration((1, 2, 4)).occupation(6)) == -1
    i_s = pc_configurations(FacetPair(1, 3), S310)
    assert Configuration((1, 2, 5)) in i_s - pinned_configurations(C310[7])


@pytest.mark.parametrize("row", [1, 3, 7, 30, 93])
def test_pair_in_class_agrees_with_derivation(row):
    derived = derive_minimal_pairs(row, C310).membership
    for pair in candidate_pairs(S310):
        assert pair_in_class(C310[row], pair) == derived[pair]


def _bd_state(a, b, c):
    return CIState(S36, {(1, 2, 3): a, (1, 4, 5): b, (2, 4, 6): c})


def test_weight_decomposition_bd_form():
    a, b, c = np.sqrt([0.7, 0.2, 0.1])
    w = weight_decomposition(_bd_state(a, b, c), BD[1], FacetPair(1, 1))
    assert w.w_s == pytest.approx(0.9) and w.w_d_minus_s == pytest.approx(0.1) and w.w_r == 0
    assert not w.inclusion and w.w_s_outside_d == 0
    assert sum(w) == pytest.approx(1)


def test_weight_decomposition_errors():
    a, b, c = np.sqrt([0.7, 0.2, 0.1])
    with pytest.raises(PairNotInClass):
        weight_decomposition(CIState(S310, {(1, 2, 3): 1}), C310[3], FacetPair(1, 1))
    with pytest.raises(SettingMismatch):
        weight_decomposition(_bd_state(a, b, c), C310[1], FacetPair(1, 1))
    with pytest.raises(NotAligned):
        weight_decomposition(CIState(S36, {(1, 2, 3): 0.6, (1, 2, 4): 0.8}), BD[1], FacetPair(1, 1))
    with pytest.raises(NotAligned):
        # diagonal but not ordered: lambda_5 < lambda_6
        weight_decomposition(_bd_state(*np.sqrt([0.7, 0.1, 0.2])), BD[1], FacetPair(1, 1))


def test_natural_occupations():
    sp, aligned = natural_occupations(CIState(S36, {(1, 2, 3): 0.6, (1, 2, 4): 0.8}))
    assert not aligned
    assert np.allclose(sp.values, [1, 1, 1, 0, 0, 0], atol=1e-12)
    sp, aligned = natural_occupations(_bd_state(*np.sqrt([0.7, 0.2, 0.1])))
    assert aligned
    assert evaluate_gpc(BD[1], sp) == pytest.approx(0, abs=1e-12)
