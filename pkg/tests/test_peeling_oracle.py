"""Peeling flags ambiguity exactly when erasure-supported corrections disagree."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complex_at
from ftcomplex.decode.sim import DecodingGraph, SyndromeSample, peel_decode
from ftcomplex.syndrome import SyndromeGraph, build_syndrome_graphs, logical_membranes
from oracles import coset_classes, random_instance, toric_graph


def as_decoding_graph(ends, mem):
    ends = np.asarray(ends, dtype=np.int64)
    n = int(ends.max()) + 1
    g = SyndromeGraph("X", np.arange(n), ends, np.arange(len(ends)))
    indptr, nbr, eid = g.csr()
    return DecodingGraph(g, ends, indptr, nbr, eid, np.asarray(mem, dtype=np.uint8))


def cubic_graphs():
    K = complex_at("cubic")
    out = []
    for g in build_syndrome_graphs(K):
        mems = logical_membranes(K, None, g.type, g)
        out.append(DecodingGraph.from_graph(g, mems))
    return out


def agree(dg, erased, flipped):
    lit = dg.graph.syndrome(flipped)
    corr, amb = peel_decode(dg, SyndromeSample(erased, flipped, lit), return_ambiguity=True)
    classes = coset_classes(dg.ends, dg.mem, erased, flipped)
    assert 0 in classes
    assert np.array_equal(dg.graph.syndrome(corr), lit)
    if amb != (len(classes) > 1):
        return False
    # unambiguous: the peeled correction is in the only class
    mine = int(np.bitwise_xor.reduce(dg.mem[corr ^ flipped])) if (corr ^ flipped).any() else 0
    return amb or mine == 0


def check_instances(count, seed):
    rng = np.random.default_rng(seed)
    cubic = cubic_graphs()
    bad = 0
    for i in range(count):
        if i % 4 == 3:
            dg = cubic[int(rng.integers(2))]
            E = dg.n_edges
            erased = rng.random(E) < rng.uniform(0.1, 0.6)
            idx = np.flatnonzero(erased)
            if idx.size > 16:
                erased[:] = False
                erased[rng.choice(idx, 16, replace=False)] = True
            flipped = erased & (rng.random(E) < 0.5)
        else:
            ends, mem, erased, flipped = random_instance(rng)
            dg = as_decoding_graph(ends, mem)
        assert dg.n_edges <= 40
        bad += not agree(dg, erased, flipped)
    return bad


def test_oracle_agreement_small_batch():
    assert check_instances(150, seed=11) == 0


def test_oracle_sees_ambiguity_on_toric_cycle():
    ends, mem = toric_graph(3)
    dg = as_decoding_graph(ends, mem)
    erased = np.zeros(len(ends), dtype=bool)
    # the horizontal row y = 0 wraps around the torus once
    erased[[2 * (x * 3) for x in range(3)]] = True
    flipped = np.zeros_like(erased)
    assert coset_classes(ends, mem, erased, flipped) == {0, 1}
    lit = dg.graph.syndrome(flipped)
    _, amb = peel_decode(dg, SyndromeSample(erased, flipped, lit), return_ambiguity=True)
    assert amb


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_agreement_property(seed):
    rng = np.random.default_rng(seed)
    ends, mem, erased, flipped = random_instance(rng)
    assert agree(as_decoding_graph(ends, mem), erased, flipped)
