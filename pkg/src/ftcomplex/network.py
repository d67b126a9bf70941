"""Fusion networks derived from fusion complexes.

Every edge ``e`` of the complex carries two qubits, ``2e`` and ``2e + 1``;
slot 0 belongs to the endpoint with the lesser vertex id.  The resource
state at a vertex is a plaquette surface code on the inflated vertex: one
plaquette per cell corner at the vertex.  Fusions measure ``XX`` and ``ZZ``
on the two qubits of each edge, and each cell gives one check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .complex import CellColoring, CellComplex, ValidationReport, bicolor_cells, validate_fusion_complex
from .errors import EmptyRegion, FullRegion, InvalidColoring, InvalidComplex
from .stab import Basis, GeneratorSet, PauliWord, group_intersection

__all__ = [
    "Check",
    "FusionNetwork",
    "build_network",
    "resource_state_stabilizers",
    "verify_check_group",
    "boundary_state",
    "qubit_slots",
]


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def qubit_slots(K: CellComplex) -> np.ndarray:
    """``(E, 2)`` array: qubit id for endpoint ``j`` of edge ``e``."""
    ev = K.edge_vertices
    swap = ev[:, 0] > ev[:, 1]
    base = 2 * np.arange(K.n_edges, dtype=np.int64)
    q = np.stack([base, base + 1], axis=1)
    q[swap] = q[swap][:, ::-1]
    return q


def _corner_qubits(K: CellComplex) -> list[dict]:
    """Per cell: vertex lift -> qubits of that vertex on the cell's edges."""
    ev = K.edge_vertices
    sh = K.bd1.shift.reshape(-1, 2, 3)
    slots = qubit_slots(K)
    out = []
    for c in range(K.n_cells):
        corners: dict = {}
        for e, t in K.cell_edges[c]:
            for j in range(2):
                key = (int(ev[e, j]), _add(t, tuple(int(x) for x in sh[e, j])))
                corners.setdefault(key, []).append(int(slots[e, j]))
        out.append(corners)
    return out


@dataclass(frozen=True)
class Check:
    cell: int
    type: str
    support: tuple[int, ...]
    word: PauliWord


@dataclass(eq=False)
class FusionNetwork:
    complex: CellComplex
    coloring: CellColoring
    checks: list[Check]
    plaquettes: list[list[tuple[int, str, tuple[int, ...]]]] = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return 2 * self.complex.n_edges

    @property
    def n_resource_states(self) -> int:
        return self.complex.n_vertices

    @property
    def n_fusions(self) -> int:
        return self.complex.n_edges

    def qubits_of(self, v: int) -> list[int]:
        return sorted({q for _, _, qs in self.plaquettes[v] for q in qs})

    @cached_property
    def resource_group(self) -> GeneratorSet:
        n = self.n_qubits
        gens, labels = [], []
        for v, plist in enumerate(self.plaquettes):
            for c, kind, qs in plist:
                gens.append(PauliWord.on(n, qs, kind))
                labels.append(f"v{v}:{kind}{c}")
        return GeneratorSet(n, tuple(gens), tuple(labels))

    @cached_property
    def fusion_group(self) -> GeneratorSet:
        n = self.n_qubits
        gens, labels = [], []
        for e in range(self.n_fusions):
            for kind in "XZ":
                gens.append(PauliWord.on(n, (2 * e, 2 * e + 1), kind))
                labels.append(f"{kind}{kind}{e}")
        return GeneratorSet(n, tuple(gens), tuple(labels))

    @cached_property
    def check_group(self) -> GeneratorSet:
        return GeneratorSet(
            self.n_qubits, tuple(c.word for c in self.checks), tuple(f"{c.type}{c.cell}" for c in self.checks)
        )

    def summary(self) -> dict:
        K = self.complex
        sizes = sorted({len(self.qubits_of(v)) for v in range(K.n_vertices)})
        return {
            "name": K.name,
            "resource_states": K.n_vertices,
            "fusions": K.n_edges,
            "qubits": self.n_qubits,
            "checks": {t: sum(c.type == t for c in self.checks) for t in "XZ"},
            "resource_sizes": sizes,
        }


def _plaquettes(K: CellComplex, coloring: CellColoring, corners=None):
    if corners is None:
        corners = _corner_qubits(K)
    per_vertex: list[list] = [[] for _ in range(K.n_vertices)]
    for c, cmap in enumerate(corners):
        for (v, _), qs in sorted(cmap.items()):
            per_vertex[v].append((c, coloring[c], tuple(sorted(qs))))
    return per_vertex


def _check_coloring(K: CellComplex, coloring: CellColoring) -> None:
    if len(coloring) != K.n_cells or not set(coloring.assignment) <= {"X", "Z"}:
        raise InvalidColoring("expected one X/Z label per cell")
    fc = K.face_cells
    for f in range(K.n_faces):
        a, b = (int(x) for x in fc.row(f))
        if coloring[a] == coloring[b]:
            raise InvalidColoring(f"face {f} separates two {coloring[a]} cells")


def build_network(K: CellComplex, coloring: CellColoring | None = None) -> FusionNetwork:
    rep = validate_fusion_complex(K)
    if not rep.valid:
        raise InvalidComplex(rep.violations[0][2])
    if coloring is None:
        coloring = bicolor_cells(K)
    _check_coloring(K, coloring)
    n = 2 * K.n_edges
    checks = []
    for c, edges in enumerate(K.cell_edges):
        par: dict[int, int] = {}
        for e, _ in edges:
            par[e] = par.get(e, 0) ^ 1
        qs = [q for e, p in par.items() if p for q in (2 * e, 2 * e + 1)]
        kind = coloring[c]
        support = tuple(sorted({e for e, _ in edges}))
        checks.append(Check(c, kind, support, PauliWord.on(n, qs, kind)))
    return FusionNetwork(K, coloring, checks, _plaquettes(K, coloring))


def resource_state_stabilizers(K: CellComplex, v: int, coloring: CellColoring | None = None) -> GeneratorSet:
    """Plaquette generators of the resource state at ``v`` on its own qubits.

    Local qubit ``i`` is the ``i``-th smallest global qubit id of ``v``.
    """
    if coloring is None:
        coloring = bicolor_cells(K)
    plist = [p for p in _plaquettes(K, coloring)[v]]
    qubits = sorted({q for _, _, qs in plist for q in qs})
    if not qubits:
        raise InvalidComplex(f"vertex {v} has no incident cells")
    local = {q: i for i, q in enumerate(qubits)}
    n = len(qubits)
    gens = tuple(PauliWord.on(n, [local[q] for q in qs], kind) for _, kind, qs in plist)
    return GeneratorSet(n, gens, tuple(f"{kind}{c}" for c, kind, _ in plist))


def verify_check_group(net: FusionNetwork, logicals=None) -> ValidationReport:
    """Checks lie in R and F, and span(checks) equals R ∩ F.

    ``info`` carries the ranks.  If ``logicals`` (PauliWords) are given, the
    report also records whether checks together with them span R ∩ F.
    """
    R, F, C = net.resource_group, net.fusion_group, net.check_group
    bR, bF = R.basis(), F.basis()
    bad = []
    for chk in net.checks:
        if chk.word.bits not in bR:
            bad.append((chk.cell, "check-in-R", f"check on cell {chk.cell} is not in R"))
        if chk.word.bits not in bF:
            bad.append((chk.cell, "check-in-F", f"check on cell {chk.cell} is not in F"))
    inter = group_intersection(R, F)
    bC = C.basis()
    rank_c, rank_i = len(bC), inter.rank
    if not all(g.bits in bC for g in inter.generators):
        bad.append((-1, "span", f"R ∩ F has rank {rank_i}, checks span rank {rank_c}"))
    info = {"rank_checks": rank_c, "rank_intersection": rank_i, "rank_R": len(bR), "rank_F": len(bF)}
    if logicals is not None:
        ext = Basis(bC.rows.values())
        for w in logicals:
            ext.add(w.bits)
        info["rank_checks_and_logicals"] = len(ext)
        info["spans_with_logicals"] = all(g.bits in ext for g in inter.generators) and all(
            w.bits in Basis(inter.basis().rows.values()) for w in logicals
        )
    return ValidationReport(not bad, bad, info=info)


def boundary_state(net: FusionNetwork, region) -> GeneratorSet:
    """Check generators of cells touching ``region``, restricted to its open qubits.

    The open qubits are those of region vertices on edges leaving the region;
    all fusions inside the region are taken as performed.
    """
    K = net.complex
    inside = np.zeros(K.n_vertices, dtype=bool)
    idx = sorted({int(v) for v in region})
    if not idx:
        raise EmptyRegion("region is empty")
    inside[idx] = True
    if inside.all():
        raise FullRegion("region contains every vertex")
    ev = K.edge_vertices
    slots = qubit_slots(K)
    open_q = set()
    for e in np.flatnonzero(inside[ev[:, 0]] != inside[ev[:, 1]]):
        j = 0 if inside[ev[e, 0]] else 1
        open_q.add(int(slots[e, j]))
    touching = sorted({c for v in idx for c, _, _ in net.plaquettes[v]})
    # product over the region of the cell's corner plaquettes
    gens, labels = [], []
    n = net.n_qubits
    for c in touching:
        acc = 0
        for v in idx:
            for cc, kind, qs in net.plaquettes[v]:
                if cc == c:
                    acc ^= PauliWord.on(n, qs, kind).bits
        w = PauliWord(n, acc).restrict(open_q)
        if not w.is_identity():
            gens.append(w)
            labels.append(f"{net.coloring[c]}{c}")
    return GeneratorSet(n, tuple(gens), tuple(labels))
