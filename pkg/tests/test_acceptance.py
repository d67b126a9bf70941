"""Acceptance suite: one test per criterion, at the stated tolerances.

The threshold tests (6, 7) take minutes and are marked slow.  Set
``FTC_RESULTS=path.json`` to keep the measured estimates.
"""

import json
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import complex_at
from ftcomplex.cli import main
from ftcomplex.complex import CellColoring, bicolor_cells, dual_faces_quadrilateral, is_isomorphic, validate_fusion_complex
from ftcomplex.decode.sim import SimConfig, default_jobs, run_montecarlo
from ftcomplex.decode.threshold import estimate_threshold
from ftcomplex.errors import NonGeneric, Unbounded
from ftcomplex.generators.arrangement import PlaneFamily, plane_arrangement
from ftcomplex.generators.catalog import FUSION_CATALOG, catalog_names
from ftcomplex.network import boundary_state, build_network, resource_state_stabilizers, verify_check_group
from ftcomplex.subsystem import build_subsystem_code, verify_subsystem_code
from ftcomplex.syndrome import derive_triplet, reinterpret_as_fusion_complex
from oracles import gf2_rank, word_rows
from test_peeling_oracle import check_instances

TRIALS = 20_000
SIZES = [4, 6, 8]


def _record(key, value):
    path = os.environ.get("FTC_RESULTS")
    if not path:
        return
    doc = {}
    if os.path.exists(path):
        with open(path) as fh:
            doc = json.load(fh)
    doc[key] = value
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


# 1 ---------------------------------------------------------------------------

TABLE = {
    "cubic": ("12", "6"),
    "alternated-cubic": ("2×6+12", "12"),
    "4-star": ("24", "3×4"),
    "pyrochlore": ("2×6+2×18", "4×6"),
}


@pytest.mark.parametrize("name", list(TABLE))
def test_c1_profiles_match_table(name, capsys):
    t0 = time.perf_counter()
    code = main(["describe", "--catalog", name])
    elapsed = time.perf_counter() - t0
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert (doc["C"], doc["R"]) == TABLE[name]
    assert elapsed < 1.0


# 2 ---------------------------------------------------------------------------

NORMALS = [(1, 1, 0), (1, 0, 1), (0, 1, 1), (1, -1, 0), (1, 1, 1), (1, -1, 1), (2, 1, 0)]
AXES = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def arrangement_outputs(count=20, seed=3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(400):
        periods = tuple(int(x) for x in rng.choice([1, 2], 3))
        fams = [PlaneFamily.uniform(n, int(rng.integers(1, 3)), Fraction(int(rng.integers(0, 4)), 4)) for n in AXES]
        for k in rng.choice(len(NORMALS), int(rng.integers(0, 3)), replace=False):
            fams.append(PlaneFamily.uniform(NORMALS[k], int(rng.integers(1, 3)), Fraction(int(rng.integers(1, 8)), 8)))
        try:
            out.append(plane_arrangement(fams, periods, f"arr{len(out)}"))
        except (NonGeneric, Unbounded):
            continue
        if len(out) == count:
            return out
    raise AssertionError("too few generic arrangements")


def test_c2_fusion_predicate_equals_dual_quadrilateral():
    complexes = [complex_at(n) for n in catalog_names()] + arrangement_outputs()
    assert len(complexes) == len(catalog_names()) + 20
    outcomes = [(validate_fusion_complex(K).valid, dual_faces_quadrilateral(K)) for K in complexes]
    assert all(a == b for a, b in outcomes)
    # both answers occur, so agreement is not vacuous
    assert {a for a, _ in outcomes} == {True, False}


# 3 ---------------------------------------------------------------------------


def _regions(K, rng, count):
    """Half random vertex subsets, half connected balls grown from a seed."""
    adj = [[] for _ in range(K.n_vertices)]
    for a, b in K.edge_vertices:
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    for i in range(count):
        size = int(rng.integers(1, K.n_vertices))
        if i % 2 == 0:
            yield rng.choice(K.n_vertices, size=size, replace=False)
            continue
        seen = {int(rng.integers(K.n_vertices))}
        frontier = list(seen)
        while frontier and len(seen) < size:
            v = frontier.pop(0)
            for w in adj[v]:
                if w not in seen and len(seen) < size:
                    seen.add(w)
                    frontier.append(w)
        yield np.array(sorted(seen))


@pytest.mark.parametrize("name", FUSION_CATALOG)
def test_c3_boundary_states_two_and_two(name):
    K = complex_at(name, (4, 4, 4))
    net = build_network(K)
    rng = np.random.default_rng(2024)
    violations = 0
    for region in _regions(K, rng, 100):
        counts: dict = {}
        for g in boundary_state(net, region).generators:
            kind = "X" if g.x_bits else "Z"
            for q in g.support():
                counts.setdefault(q, {"X": 0, "Z": 0})[kind] += 1
        violations += sum(c != {"X": 2, "Z": 2} for c in counts.values())
    assert violations == 0


# 4 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", FUSION_CATALOG)
def test_c4_resource_states_full_rank(name):
    K = complex_at(name)
    for v in range(K.n_vertices):
        S = resource_state_stabilizers(K, v)
        assert len(S) == S.n + 2
        assert gf2_rank(word_rows(S.generators)) == S.n


@pytest.mark.parametrize("name", FUSION_CATALOG)
def test_c4_cell_checks_span_intersection(name):
    # Exact as stated.  On the 3-torus R ∩ F also holds three X and three Z
    # membrane correlators that no product of cell checks reaches.
    rep = verify_check_group(build_network(complex_at(name)))
    assert rep.info["rank_checks"] == rep.info["rank_intersection"], rep.info


# 5 ---------------------------------------------------------------------------


def test_c5_triplet_interchange():
    cubic = complex_at("cubic", (4, 4, 4))
    K = reinterpret_as_fusion_complex(derive_triplet(cubic), "X")
    assert validate_fusion_complex(K).valid
    assert is_isomorphic(K, complex_at("alternated-cubic"))
    # and back: with the cell colors swapped, the X member is the cubic complex
    col = bicolor_cells(K)
    swapped = CellColoring(col.kind, tuple({"X": "Z", "Z": "X"}[c] for c in col.assignment))
    assert is_isomorphic(derive_triplet(K, swapped).x_complex, cubic)


# 6, 7 ------------------------------------------------------------------------


def _grid(lo, hi, n=10):
    return [round(float(x), 6) for x in np.linspace(lo, hi, n)]


def _threshold(name, ctype, model, decoder, grid):
    cfg = SimConfig(complex=name, dims=SIZES, check_types=[ctype], model=model, decoder=decoder,
                    p=grid, trials=TRIALS, seed=1)
    res = run_montecarlo(cfg, jobs=default_jobs())
    est = estimate_threshold(res, resamples=1000, seed=1)
    _record(f"{model}/{name}/{ctype}", {"p_star": est.p_star, "ci": list(est.ci), "crossings": list(est.crossings)})
    return est


ERASURE = [
    ("cubic", "X", 0.12, 0.01, (0.10, 0.14)),
    ("4-star", "X", 0.069, 0.01, (0.05, 0.09)),
    ("alternated-cubic", "Z", 0.12, 0.01, (0.10, 0.14)),
    ("alternated-cubic", "X", 0.25, 0.02, (0.21, 0.29)),
]

PAULI = [
    ("cubic", "X", 0.01, (0.006, 0.013)),
    ("4-star", "X", 0.0075, (0.004, 0.010)),
    ("alternated-cubic", "Z", 0.01, (0.006, 0.013)),
    ("alternated-cubic", "X", 0.029, (0.018, 0.034)),
]


@pytest.mark.slow
@pytest.mark.parametrize("name, ctype, target, tol, span", ERASURE)
def test_c6_erasure_threshold(name, ctype, target, tol, span):
    est = _threshold(name, ctype, "erasure", "peeling", _grid(*span))
    assert abs(est.p_star - target) <= tol, f"p* = {est.p_star:.4f} (CI {est.ci[0]:.4f}..{est.ci[1]:.4f})"


@pytest.mark.slow
@pytest.mark.parametrize("name, ctype, target, span", PAULI)
def test_c7_pauli_threshold(name, ctype, target, span):
    est = _threshold(name, ctype, "flip", "union-find", _grid(*span))
    rel = abs(est.p_star - target) / target
    assert rel <= 0.15, f"p* = {est.p_star:.5f} ({rel:.1%} off, CI {est.ci[0]:.5f}..{est.ci[1]:.5f})"


# 8 ---------------------------------------------------------------------------


def test_c8_peeling_matches_coset_oracle():
    assert check_instances(1000, seed=20240) == 0


# 9 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name, gauge, stab", [("cubic", [3], [12]), ("4-star", [2, 4], [24])])
def test_c9_subsystem_weights(name, gauge, stab):
    code = build_subsystem_code(complex_at(name))
    assert code.gauge_weights() == gauge
    assert code.stabilizer_weights() == stab
    rep = verify_subsystem_code(code)
    assert rep.valid, rep.violations[:3]
    assert "rank_center" in rep.info


# 10 --------------------------------------------------------------------------


def test_c10_simulate_is_deterministic(tmp_path, capsys):
    cfg = {
        "complex": "4-star",
        "dims": [2, 4],
        "check_types": ["X", "Z"],
        "model": "mixed",
        "decoder": "union-find",
        "p": [0.02, 0.06],
        "mixed_flip": 0.004,
        "trials": 3000,
        "seed": 17,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for i, jobs in enumerate([1, 2, 3, 1]):
        out = tmp_path / f"run{i}.csv"
        assert main(["simulate", str(path), "--jobs", str(jobs), "--out", str(out), "--resamples", "20"]) == 0
        outs.append(out.read_bytes())
    capsys.readouterr()
    assert all(o == outs[0] for o in outs)
    assert outs[0].count(b"\n") == 1 + 2 * 2 * 2
