"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter because ``FTC_NUMBA`` is read at
import time.  Usage::

    python3 benchmarks/bench_kernels.py [--trials 200] [--L 6]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

CASES = [
    ("cubic", "X", "peeling", 0.12, 0.0),
    ("cubic", "X", "union-find", 0.0, 0.01),
    ("4-star", "X", "union-find", 0.0, 0.0075),
]


def worker(trials: int, L: int) -> dict:
    import numpy as np

    from ftcomplex.decode import kernels as kn
    from ftcomplex.decode.sim import _quiet, backend, decoding_graph, trial_base

    out = {"backend": backend(), "cases": []}
    for name, ctype, dec, pe, pf in CASES:
        dg = decoding_graph(name, L, ctype)
        code = kn.DEC_PEEL if dec == "peeling" else kn.DEC_UF
        base = np.uint64(trial_base(1, L, pe + pf))
        args = (dg.ends, dg.indptr, dg.nbr, dg.eid, dg.mem, base)
        with _quiet():
            t0 = time.perf_counter()
            kn.run_trials(*args, 0, 1, pe, pf, code)  # compile / warm up
            t1 = time.perf_counter()
            fails = kn.run_trials(*args, 0, trials, pe, pf, code)
            t2 = time.perf_counter()
        out["cases"].append({
            "case": f"{name}/{ctype}/{dec}", "edges": dg.n_edges, "trials": trials, "failures": int(fails),
            "warmup_s": t1 - t0, "per_trial_us": 1e6 * (t2 - t1) / trials,
        })
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--L", type=int, default=6)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    a = ap.parse_args()
    if a.worker:
        print(json.dumps(worker(a.trials, a.L)))
        return
    runs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, FTC_NUMBA=flag)
        res = subprocess.run([sys.executable, __file__, "--worker", "--trials", str(a.trials), "--L", str(a.L)],
                             env=env, capture_output=True, text=True, check=True)
        doc = json.loads(res.stdout.strip().splitlines()[-1])
        runs[doc["backend"]] = doc
    print(f"{'case':28s} {'edges':>6s} {'numba us':>10s} {'python us':>10s} {'speedup':>8s} same")
    for nb, py in zip(runs["numba"]["cases"], runs["python"]["cases"]):
        sp = py["per_trial_us"] / nb["per_trial_us"]
        same = nb["failures"] == py["failures"]
        print(f"{nb['case']:28s} {nb['edges']:6d} {nb['per_trial_us']:10.1f} {py['per_trial_us']:10.1f} {sp:8.1f} {same}")


if __name__ == "__main__":
    main()
