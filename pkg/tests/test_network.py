import numpy as np
import pytest

from conftest import complex_at
from ftcomplex.complex import CellColoring, bicolor_cells
from ftcomplex.errors import EmptyRegion, InvalidColoring, InvalidComplex
from ftcomplex.network import (
    boundary_state,
    build_network,
    qubit_slots,
    resource_state_stabilizers,
    verify_check_group,
)
from ftcomplex.stab import PauliWord
from ftcomplex.syndrome import logical_membranes
from oracles import gf2_rank, in_span, symplectic, word_rows


def membrane_words(net):
    K = net.complex
    out = []
    for kind in "XZ":
        for m in logical_membranes(K, net.coloring, kind):
            out.append(PauliWord.on(net.n_qubits, [q for e in m.edges for q in (2 * e, 2 * e + 1)], kind))
    return out


def test_qubit_slots_follow_vertex_order():
    K = complex_at("cubic")
    slots = qubit_slots(K)
    ev = K.edge_vertices
    for e in range(K.n_edges):
        lo = 0 if ev[e, 0] <= ev[e, 1] else 1
        assert slots[e, lo] == 2 * e


def test_resource_states_have_n_plus_two_plaquettes(fusion_name):
    K = complex_at(fusion_name)
    for v in range(0, K.n_vertices, max(1, K.n_vertices // 8)):
        S = resource_state_stabilizers(K, v)
        assert len(S) == S.n + 2
        assert gf2_rank(word_rows(S.generators)) == S.n
        rows = word_rows(S.generators)
        assert all(symplectic(a, b) == 0 for a in rows for b in rows)


def test_cubic_resource_state_is_six_qubits():
    S = resource_state_stabilizers(complex_at("cubic"), 0)
    assert S.n == 6
    assert {g.weight() for g in S.generators} == {3}


def test_checks_lie_in_both_groups(fusion_name):
    net = build_network(complex_at(fusion_name))
    R = word_rows(net.resource_group.generators)
    F = word_rows(net.fusion_group.generators)
    for chk in net.checks[:12]:
        row = word_rows([chk.word])[0]
        assert in_span(R, row)
        assert in_span(F, row)


def test_intersection_rank_matches_dense_oracle():
    net = build_network(complex_at("cubic"))
    R = word_rows(net.resource_group.generators)
    F = word_rows(net.fusion_group.generators)
    want = gf2_rank(R) + gf2_rank(F) - gf2_rank(R + F)
    rep = verify_check_group(net)
    assert rep.info["rank_intersection"] == want == 12
    assert rep.info["rank_checks"] == 6


def test_checks_plus_membranes_span_intersection(fusion_name):
    net = build_network(complex_at(fusion_name))
    rep = verify_check_group(net, logicals=membrane_words(net))
    assert rep.info["spans_with_logicals"]
    assert rep.info["rank_checks_and_logicals"] == rep.info["rank_intersection"]
    assert rep.info["rank_intersection"] - rep.info["rank_checks"] == 6


def test_check_weights_match_cell_sizes():
    net = build_network(complex_at("alternated-cubic"))
    assert sorted({c.word.weight() for c in net.checks}) == [12, 24]


def test_summary():
    s = build_network(complex_at("cubic")).summary()
    assert s["resource_states"] == 8 and s["fusions"] == 24 and s["qubits"] == 48
    assert s["checks"] == {"X": 4, "Z": 4}
    assert s["resource_sizes"] == [6]


def test_non_fusion_complex_rejected():
    with pytest.raises(InvalidComplex):
        build_network(complex_at("hexagonal-prism"))


def test_improper_coloring_rejected():
    K = complex_at("cubic")
    with pytest.raises(InvalidColoring):
        build_network(K, CellColoring("cells", ("X",) * K.n_cells))


def boundary_counts(net, region):
    """Per open qubit: how many X-type and Z-type generators touch it."""
    B = boundary_state(net, region)
    counts: dict = {}
    for g in B.generators:
        kind = "X" if g.x_bits else "Z"
        for q in g.support():
            counts.setdefault(q, {"X": 0, "Z": 0})[kind] += 1
    return B, counts


@pytest.mark.parametrize("seed", range(5))
def test_boundary_state_two_and_two(seed):
    K = complex_at("cubic", (4, 4, 4))
    net = build_network(K)
    rng = np.random.default_rng(seed)
    region = rng.choice(K.n_vertices, size=rng.integers(1, K.n_vertices), replace=False)
    B, counts = boundary_counts(net, region)
    assert counts
    assert all(c == {"X": 2, "Z": 2} for c in counts.values())
    rows = word_rows(B.generators)
    assert all(symplectic(a, b) == 0 for a in rows for b in rows)


def test_single_vertex_boundary_is_its_resource_state():
    K = complex_at("cubic", (4, 4, 4))
    net = build_network(K)
    B = boundary_state(net, [0])
    assert len(B) == 8
    assert {g.weight() for g in B.generators} == {3}


def test_empty_region():
    net = build_network(complex_at("cubic"))
    with pytest.raises(EmptyRegion):
        boundary_state(net, [])


def test_coloring_default_is_canonical():
    K = complex_at("cubic")
    assert build_network(K).coloring == bicolor_cells(K)
