import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftcomplex.errors import LengthMismatch
from ftcomplex.stab import (
    Basis,
    GeneratorSet,
    PauliWord,
    centralizer_intersection,
    commutes,
    group_intersection,
    span_reduce,
)
from oracles import all_products, gf2_rank, symplectic, word_rows


def words(n, k):
    letters = st.text(alphabet="IXYZ", min_size=n, max_size=n)
    return st.lists(letters, min_size=0, max_size=k)


def test_string_round_trip():
    w = PauliWord.from_string("XIZY")
    assert w.to_string() == "XIZY"
    assert w.support() == [0, 2, 3]
    assert w.weight() == 3


def test_bad_letter():
    with pytest.raises(ValueError):
        PauliWord.from_string("XQ")


def test_on_cancels_repeats():
    assert PauliWord.on(4, [1, 1, 2], "Z").to_string() == "IIZI"


def test_commutation_basics():
    x, z, y = (PauliWord.from_string(s) for s in ("XI", "ZI", "YI"))
    assert not commutes(x, z)
    assert not x.commutes(y)
    assert commutes(PauliWord.from_string("XX"), PauliWord.from_string("ZZ"))


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        PauliWord.from_string("XX") * PauliWord.from_string("X")
    with pytest.raises(LengthMismatch):
        GeneratorSet(2, (PauliWord.from_string("XXX"),))


def test_restrict():
    w = PauliWord.from_string("XYZX").restrict([1, 2])
    assert w.to_string() == "IYZI"


@settings(max_examples=60, deadline=None)
@given(words(6, 8))
def test_rank_matches_dense_oracle(ws):
    g = GeneratorSet.from_strings(ws) if ws else GeneratorSet(6)
    assert g.rank == gf2_rank(word_rows(g.generators))


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="IXYZ", min_size=5, max_size=5), st.text(alphabet="IXYZ", min_size=5, max_size=5))
def test_commutes_matches_symplectic_form(a, b):
    pa, pb = PauliWord.from_string(a), PauliWord.from_string(b)
    ra, rb = word_rows([pa, pb])
    assert pa.commutes(pb) == (symplectic(ra, rb) == 0)


@settings(max_examples=40, deadline=None)
@given(words(4, 4), words(4, 4))
def test_intersection_matches_enumeration(a, b):
    ga = GeneratorSet.from_strings(a) if a else GeneratorSet(4)
    gb = GeneratorSet.from_strings(b) if b else GeneratorSet(4)
    inter = group_intersection(ga, gb)
    want = all_products(word_rows(ga.generators), 8) & all_products(word_rows(gb.generators), 8)
    got = all_products(word_rows(inter.generators), 8)
    assert got == want


@settings(max_examples=40, deadline=None)
@given(words(4, 5))
def test_centralizer_intersection_matches_enumeration(ws):
    g = GeneratorSet.from_strings(ws) if ws else GeneratorSet(4)
    rows = word_rows(g.generators)
    group = all_products(rows, 8)
    want = {w for w in group if all(symplectic(w, r) == 0 for r in rows)}
    c = centralizer_intersection(g)
    got = all_products(word_rows(c.generators), 8)
    assert got == want


def test_span_reduce_same_group():
    g = GeneratorSet.from_strings(["XXI", "IXX", "XIX", "ZZZ"])
    r = span_reduce(g)
    assert r.rank == len(r) == 3
    assert r.same_group(g)
    assert g.issubgroup(r) and r.issubgroup(g)


def test_basis_membership():
    b = Basis([0b011, 0b110])
    assert 0b101 in b
    assert 0b001 not in b
    assert not b.add(0b101)
    assert b.add(0b001)
    assert len(b) == 3


def test_to_text_labels():
    g = GeneratorSet.from_strings(["XZ", "ZX"], labels=["a", "b"])
    assert g.to_text() == "XZ\ta\nZX\tb\n"


def test_xz_parts():
    w = PauliWord.from_xz([1, 0, 1], [0, 1, 1])
    assert w.to_string() == "XZY"
    assert np.array_equal(w.z_part, [False, True, True])
