from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quasipin.catalog import (
    KNOWN_SETTINGS, ConstraintCatalog, FacetPair, GPConstraint, Setting, canonical_pair,
    candidate_pairs, catalog_from_table, check_pair, decode_pair_notation, encode_pair,
    export_catalog, format_pair_cell, load_setting, parse_pair_cell, raw_table_cells,
)
from quasipin.errors import InvalidPair, MalformedEntry, UnknownSetting

D10 = [Setting(3, 10), Setting(4, 10), Setting(5, 10)]


@pytest.mark.parametrize("setting,count", [((3, 6), 1), ((3, 10), 93), ((4, 10), 125), ((5, 10), 161)])
def test_row_counts(setting, count):
    assert len(load_setting(setting)) == count


def test_borland_dennis_catalog():
    cat = load_setting("3,6")
    (con,) = cat
    assert con.coeffs == (2, -1, -1, 0, -1, 0, 0)
    assert con.minimal_pairs == (FacetPair(1, 1),)
    assert con.prefactors == (Fraction(1, 2),)
    assert len(cat.equalities) == 3


def test_unknown_setting():
    with pytest.raises(UnknownSetting):
        load_setting((4, 8))
    with pytest.raises(UnknownSetting):
        load_setting("nonsense")


def test_one_based_indexing():
    cat = load_setting((3, 10))
    assert cat[1].index == 1 and cat[93].index == 93
    for bad in (0, 94):
        with pytest.raises(KeyError):
            cat[bad]


def test_table_examples():
    cat = load_setting((3, 10))
    assert cat[3].minimal_pairs == () and cat[3].scalar_bound == Fraction(9, 14)
    assert set(cat[7].minimal_pairs) == {FacetPair(0, 4), FacetPair(1, 3)}
    assert cat[7].prefactor_for(FacetPair(0, 4)) == 1
    assert cat[7].prefactor_for(FacetPair(1, 3)) == Fraction(3, 4)
    assert cat[54].prefactors == (Fraction(29, 12),)


@pytest.mark.parametrize("text,pair", [(["7"], FacetPair(0, 4)), (["1", "8"], FacetPair(1, 3)),
                                       (["3"], FacetPair(3, 0)), (["11"], None)])
def test_decode_examples(text, pair):
    setting = Setting(3, 10)
    if pair is None:
        with pytest.raises(MalformedEntry):
            decode_pair_notation(text, setting)
    else:
        assert decode_pair_notation(text, setting) == pair


def test_decode_rejects_malformed():
    s = Setting(3, 10)
    for entry in ([], ["1", "2", "3"], ["0"], ["12"]):
        with pytest.raises(MalformedEntry):
            decode_pair_notation(entry, s)


@pytest.mark.parametrize("setting", D10)
def test_printed_cells_round_trip(setting):
    for _, cell, _ in raw_table_cells(setting):
        assert format_pair_cell(parse_pair_cell(cell, setting), setting) == cell


@given(st.sampled_from(KNOWN_SETTINGS), st.data())
def test_encode_decode_inverse(setting, data):
    pair = data.draw(st.sampled_from(candidate_pairs(setting)))
    assert decode_pair_notation(encode_pair(pair, setting), setting) == pair


def test_pair_validation():
    with pytest.raises(InvalidPair):
        FacetPair(0, 0)
    with pytest.raises(InvalidPair):
        FacetPair(-1, 2)
    with pytest.raises(InvalidPair):
        check_pair(FacetPair(4, 0), Setting(3, 10))
    with pytest.raises(InvalidPair):
        check_pair(FacetPair(0, 8), Setting(3, 10))


def test_canonical_pair_collapses_onto_hartree_fock():
    s = Setting(3, 10)
    assert canonical_pair(FacetPair(3, 1), s) == FacetPair(3, 7)
    assert canonical_pair(FacetPair(0, 7), s) == FacetPair(3, 7)
    assert canonical_pair(FacetPair(1, 2), s) == FacetPair(1, 2)


def test_candidate_pairs_borland_dennis_diagonal():
    pairs = candidate_pairs(Setting(3, 6))
    assert all(p.r == p.s for p in pairs)
    assert FacetPair(1, 1) in pairs


def test_minimal_pairs_are_antichains():
    for setting in D10:
        for con in load_setting(setting):
            for a in con.minimal_pairs:
                assert not any(a != b and a.is_below(b) for b in con.minimal_pairs)


def test_comparable_minimal_pairs_rejected():
    with pytest.raises(ValueError):
        GPConstraint(Setting(3, 10), 1, (0,) * 11, (FacetPair(0, 1), FacetPair(0, 2)), (1, 1))


def test_export_is_stable_and_complete():
    for setting in KNOWN_SETTINGS:
        cat = load_setting(setting)
        text = export_catalog(cat)
        assert text == export_catalog(load_setting(setting))
        assert len(text.splitlines()) == len(cat) + len(cat.equalities)


def test_catalog_from_table_matches_shipped():
    cat = load_setting((3, 10))
    lines = [f"{c.index}\t{' '.join(map(str, c.coeffs))}\t{format_pair_cell(c.minimal_pairs, cat.setting)}\t"
             f"{', '.join(map(str, c.prefactors))}" for c in cat]
    rebuilt = catalog_from_table("\n".join(lines), (3, 10))
    assert rebuilt.inequalities == cat.inequalities


def test_catalog_from_table_rejects_garbage():
    with pytest.raises(MalformedEntry):
        catalog_from_table("1\t2 -1\n", (3, 10))


def test_replace_row():
    cat = load_setting((3, 10))
    con = cat[5]
    new = GPConstraint(con.setting, 5, con.coeffs, con.minimal_pairs, tuple(c * 2 for c in con.prefactors))
    changed = cat.replace(new)
    assert isinstance(changed, ConstraintCatalog)
    assert changed[5] is new and cat[5] is con
