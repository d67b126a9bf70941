import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ftcomplex.decode import kernels as kn
from ftcomplex.decode.sim import (
    CSV_HEADER,
    ErrorModel,
    SimConfig,
    SimResult,
    SimRow,
    SyndromeSample,
    decoding_graph,
    logical_failure,
    peel_decode,
    run_montecarlo,
    sample,
    trial_base,
    uf_decode,
    wilson_interval,
)
from ftcomplex.decode.threshold import estimate_threshold, pairwise_crossings
from ftcomplex.errors import ConfigInvalid, NoCrossingInGrid, UnsatisfiableSyndrome


@pytest.fixture(scope="module")
def cubic6():
    return decoding_graph("cubic", 6, "X")


def syndrome_of(dg, mask):
    lit = np.zeros(dg.n_checks, dtype=np.uint8)
    kn.syndrome_of(dg.ends, dg.n_checks, np.asarray(mask, dtype=np.uint8), lit)
    return lit.astype(bool)


# ----------------------------------------------------------------- sampling


def test_sample_is_deterministic(cubic6):
    a = sample(cubic6, ErrorModel(0.2, 0.05), 1234)
    b = sample(cubic6, ErrorModel(0.2, 0.05), 1234)
    c = sample(cubic6, ErrorModel(0.2, 0.05), 1235)
    assert np.array_equal(a.erased, b.erased) and np.array_equal(a.flipped, b.flipped)
    assert not np.array_equal(a.erased, c.erased)


def test_zero_noise(cubic6):
    s = sample(cubic6, ErrorModel(0.0, 0.0), 9)
    assert not s.erased.any() and not s.flipped.any() and not s.lit.any()


def test_sample_rates(cubic6):
    er = fl = ef = 0
    for t in range(200):
        s = sample(cubic6, ErrorModel(0.3, 0.0), t)
        er += s.erased.sum()
        ef += (s.flipped & s.erased).sum()
        fl += (s.flipped & ~s.erased).sum()
    total = 200 * cubic6.n_edges
    assert abs(er / total - 0.3) < 0.01
    assert fl == 0
    # erased outcomes are replaced by a fair coin
    assert abs(ef / er - 0.5) < 0.02


def test_syndrome_matches_flips(cubic6):
    s = sample(cubic6, ErrorModel(0.0, 0.05), 3)
    assert np.array_equal(s.lit, syndrome_of(cubic6, s.flipped))


def test_error_model_validation():
    with pytest.raises(ConfigInvalid):
        ErrorModel(1.5, 0.0)
    with pytest.raises(ConfigInvalid):
        ErrorModel(0.1, -0.1)


def test_trial_base_depends_on_every_input():
    keys = {trial_base(0, 4, 0.1), trial_base(1, 4, 0.1), trial_base(0, 6, 0.1), trial_base(0, 4, 0.11)}
    assert len(keys) == 4


# ----------------------------------------------------------------- decoders


def test_peeling_explains_syndrome(cubic6):
    for t in range(50):
        s = sample(cubic6, ErrorModel(0.15, 0.0), t)
        corr, amb = peel_decode(cubic6, s, return_ambiguity=True)
        assert not (corr & ~s.erased).any()
        assert np.array_equal(syndrome_of(cubic6, corr), s.lit)
        if not amb:
            assert not logical_failure(cubic6, s, corr)


def test_peeling_rejects_unerased_flips(cubic6):
    flipped = np.zeros(cubic6.n_edges, dtype=bool)
    flipped[0] = True
    s = SyndromeSample(np.zeros_like(flipped), flipped, syndrome_of(cubic6, flipped))
    with pytest.raises(UnsatisfiableSyndrome):
        peel_decode(cubic6, s)


def test_union_find_explains_syndrome(cubic6):
    for t in range(50):
        s = sample(cubic6, ErrorModel(0.05, 0.01), t)
        corr = uf_decode(cubic6, s)
        assert np.array_equal(syndrome_of(cubic6, corr), s.lit)


def test_union_find_corrects_single_flips(cubic6):
    for e in range(0, cubic6.n_edges, 37):
        flipped = np.zeros(cubic6.n_edges, dtype=bool)
        flipped[e] = True
        s = SyndromeSample(np.zeros_like(flipped), flipped, syndrome_of(cubic6, flipped))
        corr = uf_decode(cubic6, s)
        assert not logical_failure(cubic6, s, corr)


def test_union_find_corrects_pairs_far_below_distance():
    dg = decoding_graph("4-star", 4, "X")
    rng = np.random.default_rng(0)
    for _ in range(40):
        flipped = np.zeros(dg.n_edges, dtype=bool)
        flipped[rng.choice(dg.n_edges, 2, replace=False)] = True
        s = SyndromeSample(np.zeros_like(flipped), flipped, syndrome_of(dg, flipped))
        assert not logical_failure(dg, s, uf_decode(dg, s))


def test_logical_failure_detects_membrane_crossing(cubic6):
    # a full nontrivial cycle of flips is undetectable and logical
    g = cubic6.graph
    mem0 = (cubic6.mem & 1).astype(bool)
    flips = np.zeros(cubic6.n_edges, dtype=bool)
    corr = np.zeros_like(flips)
    flips[np.flatnonzero(mem0)[0]] = True
    assert logical_failure(cubic6, SyndromeSample(flips, flips, g.syndrome(flips)), corr)


# --------------------------------------------------------------- simulation


def cfg(**kw):
    base = dict(complex="cubic", dims=[4], p=[0.1, 0.2], trials=300, seed=5)
    base.update(kw)
    return SimConfig(**base)


def test_zero_rate_gives_zero_failures():
    res = run_montecarlo(cfg(p=[0.0], dims=[4, 6]))
    assert all(r.failures == 0 for r in res.rows)


def test_results_independent_of_jobs_and_chunking():
    c = cfg(trials=2300, dims=[4], p=[0.12])
    a = run_montecarlo(c, jobs=1).to_csv()
    b = run_montecarlo(c, jobs=2).to_csv()
    assert a == b


def test_union_find_runs():
    res = run_montecarlo(cfg(model="flip", decoder="union-find", p=[0.0, 0.02]))
    assert res.rows[0].failures == 0
    assert res.rows[1].failures > 0


def test_mixed_model_runs():
    res = run_montecarlo(cfg(model="mixed", decoder="union-find", p=[0.05], mixed_flip=0.005))
    assert res.rows[0].error_model == "mixed"


def test_csv_round_trip():
    res = run_montecarlo(cfg())
    text = res.to_csv()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    back = SimResult.from_csv(text)
    assert back.to_csv() == text


@pytest.mark.parametrize(
    "kw",
    [
        dict(trials=0),
        dict(p=[]),
        dict(p=[0.2, 0.1]),
        dict(model="depolarizing"),
        dict(decoder="mwpm"),
        dict(model="flip", decoder="peeling"),
        dict(check_types=["Y"]),
        dict(dims=[]),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ConfigInvalid):
        cfg(**kw)


def test_config_json_overrides():
    text = json.dumps(dict(complex="cubic", dims=[4], p=[0.1], trials=10, seed=1))
    c = SimConfig.from_json(text, seed=9, trials=None)
    assert c.seed == 9 and c.trials == 10
    with pytest.raises(ConfigInvalid):
        SimConfig.from_json('{"complex": "cubic", "bogus": 1}')
    with pytest.raises(ConfigInvalid):
        SimConfig.from_json("[1, 2]")


def test_unknown_complex():
    with pytest.raises(ConfigInvalid):
        run_montecarlo(cfg(complex="nope"))


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert abs((lo + hi) / 2 - 0.5) < 1e-12


# ---------------------------------------------------------------- threshold


def synthetic(p_star=0.1, Ls=(4, 6, 8), n=10**6):
    rows = []
    grid = np.linspace(0.06, 0.14, 9)
    for L in Ls:
        for p in grid:
            rate = 1 / (1 + np.exp(-(p - p_star) * L * 60))
            rows.append(SimRow("x", "X", "peeling", "erasure", L, float(p), n, int(round(rate * n)), 0))
    return SimResult(rows)


def test_threshold_recovers_synthetic_crossing():
    est = estimate_threshold(synthetic(), resamples=200)
    assert abs(est.p_star - 0.1) < 1e-3
    assert est.ci[0] <= est.p_star <= est.ci[1]
    assert len(est.crossings) == 2


def test_threshold_is_reproducible():
    a = estimate_threshold(synthetic(), resamples=100, seed=3)
    b = estimate_threshold(synthetic(), resamples=100, seed=3)
    assert a == b


def test_no_crossing():
    with pytest.raises(NoCrossingInGrid):
        estimate_threshold(synthetic(p_star=0.3), resamples=10)
    with pytest.raises(NoCrossingInGrid):
        estimate_threshold(synthetic(Ls=(4,)), resamples=10)


def test_pairwise_crossings_linear():
    p = np.array([0.0, 1.0])
    f = np.array([[30, 70], [20, 80]])
    n = np.full_like(f, 100)
    (x,) = pairwise_crossings(p, f, n)
    assert 0.0 < x < 1.0


# ------------------------------------------------------------------ backend


def test_python_fallback_matches_numba():
    code = (
        "import numpy as np\n"
        "from ftcomplex.decode import kernels as kn\n"
        "from ftcomplex.decode.sim import decoding_graph, trial_base, _quiet, backend\n"
        "dg = decoding_graph('cubic', 4, 'X')\n"
        "out = [backend()]\n"
        "with _quiet():\n"
        "    for dec, pe, pf in ((0, 0.15, 0.0), (1, 0.05, 0.02)):\n"
        "        b = np.uint64(trial_base(1, 4, pe + pf))\n"
        "        out.append(int(kn.run_trials(dg.ends, dg.indptr, dg.nbr, dg.eid, dg.mem, b, 0, 60, pe, pf, dec)))\n"
        "print(*out)\n"
    )
    runs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, FTC_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        name, *counts = res.stdout.split()
        runs[name] = counts
    assert set(runs) == {"python", "numba"}
    assert runs["python"] == runs["numba"]
