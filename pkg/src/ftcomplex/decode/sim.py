"""Monte Carlo estimation of logical error rates.

Trials are seeded by a counter-based hash of (master seed, L, p, trial), so
results do not depend on how trials are chunked or on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from ..complex import bicolor_cells, instantiate
from ..errors import ConfigInvalid, UnsatisfiableSyndrome
from ..generators.catalog import catalog
from ..syndrome import SyndromeGraph, build_syndrome_graphs, logical_membranes
from . import kernels as kn
from ._accel import BACKEND

__all__ = [
    "ErrorModel",
    "SimConfig",
    "SimRow",
    "SimResult",
    "SyndromeSample",
    "DecodingGraph",
    "decoding_graph",
    "sample",
    "peel_decode",
    "uf_decode",
    "run_montecarlo",
    "wilson_interval",
    "CSV_HEADER",
]

CSV_HEADER = [
    "complex", "check_type", "decoder", "error_model", "L", "p", "trials",
    "failures", "logical_rate", "ci_low", "ci_high", "seed",
]
CHUNK = 1000


@dataclass(frozen=True)
class ErrorModel:
    p_erasure: float = 0.0
    p_flip: float = 0.0

    def __post_init__(self):
        for name in ("p_erasure", "p_flip"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigInvalid(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class SyndromeSample:
    erased: np.ndarray
    flipped: np.ndarray
    lit: np.ndarray


@dataclass(eq=False)
class DecodingGraph:
    """Syndrome graph plus packed arrays consumed by the kernels."""

    graph: SyndromeGraph
    ends: np.ndarray
    indptr: np.ndarray
    nbr: np.ndarray
    eid: np.ndarray
    mem: np.ndarray  # bit i set if the edge lies on membrane i

    @classmethod
    def from_graph(cls, g: SyndromeGraph, membranes=None) -> "DecodingGraph":
        indptr, nbr, eid = g.csr()
        mem = np.zeros(g.n_edges, dtype=np.uint8)
        if membranes is not None:
            for i, m in enumerate(membranes):
                mem[list(m.edges)] |= np.uint8(1 << i)
        elif g.crossing is not None:
            for i in range(3):
                mem |= (g.crossing[:, i].astype(np.uint8) << i)
        return cls(g, np.ascontiguousarray(g.edges, dtype=np.int64), indptr, nbr, eid, mem)

    @property
    def n_edges(self) -> int:
        return len(self.ends)

    @property
    def n_checks(self) -> int:
        return len(self.indptr) - 1


def decoding_graph(name: str, L: int, check_type: str) -> DecodingGraph:
    return _decoding_graph(name, int(L), check_type)


@lru_cache(maxsize=16)
def _decoding_graph(name, L, check_type):
    K = instantiate(catalog(name), (L, L, L))
    col = bicolor_cells(K)
    gx, gz = build_syndrome_graphs(K, col)
    g = gx if check_type == "X" else gz
    mems = logical_membranes(K, col, check_type, g)
    return DecodingGraph.from_graph(g, mems)


def _as_dg(graph) -> DecodingGraph:
    return graph if isinstance(graph, DecodingGraph) else DecodingGraph.from_graph(graph)


class _quiet:
    """Silence numpy scalar-overflow warnings of the wrapping hash in pure Python."""

    def __enter__(self):
        self._s = np.seterr(over="ignore")

    def __exit__(self, *exc):
        np.seterr(**self._s)


def _p_key(p: float) -> int:
    return int(round(float(p) * 1e12))


def trial_base(seed: int, L: int, p: float) -> int:
    """Stream key shared by all trials of one (seed, L, p) point."""
    with _quiet():
        x = kn.mix64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF))
        x = kn.mix64(x ^ np.uint64(int(L)))
        x = kn.mix64(x ^ np.uint64(_p_key(p)))
    return int(x)


def sample(graph, model: ErrorModel, trial_seed: int) -> SyndromeSample:
    """Independent per-edge erasures and flips; erased outcomes flip with 1/2."""
    dg = _as_dg(graph)
    E = dg.n_edges
    erased = np.zeros(E, dtype=np.uint8)
    flipped = np.zeros(E, dtype=np.uint8)
    lit = np.zeros(dg.n_checks, dtype=np.uint8)
    with _quiet():
        # numba hands uint64 results back as Python ints; keep the dtype fixed
        key = np.uint64(kn.mix64(np.uint64(int(trial_seed) & 0xFFFFFFFFFFFFFFFF)))
        kn.sample_edges(key, E, float(model.p_erasure), float(model.p_flip), erased, flipped)
    kn.syndrome_of(dg.ends, dg.n_checks, flipped, lit)
    return SyndromeSample(erased.astype(bool), flipped.astype(bool), lit.astype(bool))


def _scratch(dg: DecodingGraph):
    n, E = dg.n_checks, dg.n_edges
    return np.zeros(4 * n + E, dtype=np.int64), np.zeros(n, dtype=np.uint8)


def peel_decode(graph, s: SyndromeSample, return_ambiguity: bool = False):
    """Peeling decoder for pure erasure.

    Returns the correction mask; with ``return_ambiguity`` also whether the
    erasure contains a cycle of nontrivial logical class, in which case no
    decoder can tell the logical class apart.
    """
    dg = _as_dg(graph)
    if np.any(s.flipped & ~s.erased):
        raise UnsatisfiableSyndrome("peeling needs every flipped edge to be erased")
    lit = s.lit.astype(np.uint8)
    corr = np.zeros(dg.n_edges, dtype=np.uint8)
    work, seen = _scratch(dg)
    ok, amb = kn.peel(dg.indptr, dg.nbr, dg.eid, dg.mem, s.erased.astype(np.uint8), lit, corr, work, seen)
    if not ok:
        raise UnsatisfiableSyndrome("a lit check lies outside the erased subgraph")
    corr = corr.astype(bool)
    return (corr, bool(amb)) if return_ambiguity else corr


def uf_decode(graph, s: SyndromeSample) -> np.ndarray:
    """Union-find decoder; erased edges join clusters at zero weight."""
    dg = _as_dg(graph)
    lit = s.lit.astype(np.uint8)
    E = dg.n_edges
    corr = np.zeros(E, dtype=np.uint8)
    support = np.zeros(E, dtype=np.uint8)
    grown = np.zeros(E, dtype=np.uint8)
    work, seen = _scratch(dg)
    ok, _ = kn.union_find(
        dg.ends, dg.indptr, dg.nbr, dg.eid, dg.mem, s.erased.astype(np.uint8), lit, corr, support, grown, work, seen
    )
    if not ok:
        raise UnsatisfiableSyndrome("odd cluster could not be neutralized")
    return corr.astype(bool)


def logical_failure(graph, s: SyndromeSample, correction) -> bool:
    dg = _as_dg(graph)
    return kn.membrane_parity(dg.mem, s.flipped.astype(np.uint8), np.asarray(correction, dtype=np.uint8)) != 0


# --------------------------------------------------------------- simulation


@dataclass
class SimConfig:
    complex: str
    dims: list[int]
    check_types: list[str] = field(default_factory=lambda: ["X"])
    model: str = "erasure"  # erasure, flip or mixed
    decoder: str = "peeling"
    p: list[float] = field(default_factory=list)
    trials: int = 1000
    seed: int = 0
    mixed_flip: float = 0.0  # p_flip used when model == "mixed"

    def __post_init__(self):
        self.dims = [int(d) for d in self.dims]
        self.p = [float(x) for x in self.p]
        if isinstance(self.check_types, str):
            self.check_types = [self.check_types]
        if self.trials < 1:
            raise ConfigInvalid("trials must be at least 1")
        if not self.dims:
            raise ConfigInvalid("dims must list at least one L")
        if not self.p:
            raise ConfigInvalid("p grid is empty")
        if self.p != sorted(self.p):
            raise ConfigInvalid("p grid must be sorted ascending")
        if self.model not in ("erasure", "flip", "mixed"):
            raise ConfigInvalid(f"unknown error model {self.model!r}")
        if self.decoder not in ("peeling", "union-find"):
            raise ConfigInvalid(f"unknown decoder {self.decoder!r}")
        if self.decoder == "peeling" and self.model != "erasure":
            raise ConfigInvalid("the peeling decoder handles pure erasure only")
        for t in self.check_types:
            if t not in ("X", "Z"):
                raise ConfigInvalid(f"check type must be X or Z, not {t!r}")
        for p in self.p:
            ErrorModel(p, 0.0)

    def error_model(self, p: float) -> ErrorModel:
        if self.model == "erasure":
            return ErrorModel(p_erasure=p)
        if self.model == "flip":
            return ErrorModel(p_flip=p)
        return ErrorModel(p_erasure=p, p_flip=self.mixed_flip)

    @classmethod
    def from_json(cls, text: str, **overrides) -> "SimConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigInvalid("config must be a JSON object")
        doc.update({k: v for k, v in overrides.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigInvalid(f"unknown config fields {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from None

    def to_dict(self) -> dict:
        return asdict(self)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054):
    if n == 0:
        return 0.0, 1.0
    ph = k / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * np.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, float(centre - half))
    hi = 1.0 if k == n else min(1.0, float(centre + half))
    return lo, hi


@dataclass(frozen=True)
class SimRow:
    complex: str
    check_type: str
    decoder: str
    error_model: str
    L: int
    p: float
    trials: int
    failures: int
    seed: int

    @property
    def logical_rate(self) -> float:
        return self.failures / self.trials

    @property
    def ci(self):
        return wilson_interval(self.failures, self.trials)

    def csv_fields(self) -> list[str]:
        lo, hi = self.ci
        return [
            self.complex, self.check_type, self.decoder, self.error_model, str(self.L),
            f"{self.p:.10g}", str(self.trials), str(self.failures), f"{self.logical_rate:.8g}",
            f"{lo:.8g}", f"{hi:.8g}", str(self.seed),
        ]


@dataclass
class SimResult:
    rows: list[SimRow]
    config: SimConfig | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SimResult":
        rd = csv.DictReader(io.StringIO(text))
        if rd.fieldnames != CSV_HEADER:
            raise ConfigInvalid("unexpected CSV header")
        rows = [
            SimRow(d["complex"], d["check_type"], d["decoder"], d["error_model"], int(d["L"]), float(d["p"]),
                   int(d["trials"]), int(d["failures"]), int(d["seed"]))
            for d in rd
        ]
        return cls(rows)

    def select(self, check_type: str | None = None) -> "SimResult":
        return SimResult([r for r in self.rows if check_type is None or r.check_type == check_type], self.config)


def _run_chunk(task):
    name, L, ctype, p_e, p_f, decoder, seed, p, start, count = task
    dg = decoding_graph(name, L, ctype)
    base = trial_base(seed, L, p)
    dec = kn.DEC_PEEL if decoder == "peeling" else kn.DEC_UF
    with _quiet():
        return int(kn.run_trials(dg.ends, dg.indptr, dg.nbr, dg.eid, dg.mem, np.uint64(base),
                                 start, count, float(p_e), float(p_f), dec))


def _tasks(cfg: SimConfig):
    for ctype in cfg.check_types:
        for L in cfg.dims:
            for p in cfg.p:
                m = cfg.error_model(p)
                for start in range(0, cfg.trials, CHUNK):
                    count = min(CHUNK, cfg.trials - start)
                    yield (ctype, L, p), (cfg.complex, L, ctype, m.p_erasure, m.p_flip, cfg.decoder,
                                          cfg.seed, p, start, count)


def run_montecarlo(cfg: SimConfig, jobs: int = 1, progress=None) -> SimResult:
    """Run every (check type, L, p) point of the config.

    ``jobs > 1`` farms chunks of trials to worker processes.  The output is
    identical for every ``jobs`` value.
    """
    try:
        catalog(cfg.complex)
    except KeyError as exc:
        raise ConfigInvalid(str(exc)) from None
    keys, tasks = zip(*_tasks(cfg))
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            counts = list(ex.map(_run_chunk, tasks, chunksize=1))
    else:
        counts = []
        for i, t in enumerate(tasks):
            counts.append(_run_chunk(t))
            if progress:
                progress(i + 1, len(tasks))
    fails: dict = {}
    for k, c in zip(keys, counts):
        fails[k] = fails.get(k, 0) + c
    rows = []
    for ctype in cfg.check_types:
        for L in cfg.dims:
            for p in cfg.p:
                rows.append(SimRow(cfg.complex, ctype, cfg.decoder, cfg.model, L, p, cfg.trials,
                                   fails[(ctype, L, p)], cfg.seed))
    return SimResult(rows, cfg)


def default_jobs() -> int:
    return max(1, (os.cpu_count() or 1))


def backend() -> str:
    return BACKEND
