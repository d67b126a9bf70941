"""Syndrome graphs, structural profiles, logical membranes and triplets.

For a bicolored fusion complex every edge lies in exactly two X-cells and
two Z-cells, so it is one edge of the X syndrome graph (between its X-cells)
and one edge of the Z syndrome graph.  Logical membranes are read off the
torus wraps: a syndrome edge lies on membrane ``i`` when its two checks sit
in lifts whose displacement along axis ``i`` is odd, so that a closed
syndrome cycle meets it an odd number of times exactly when it winds an odd
number of times around axis ``i``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .complex import CellColoring, CellComplex, Incidence, bicolor_cells, dualize, validate_fusion_complex
from .errors import HomologyRankUnexpected, InvalidComplex
from .stab import Basis

__all__ = [
    "SyndromeGraph",
    "LogicalMembrane",
    "TripletComplexes",
    "build_syndrome_graphs",
    "check_profiles",
    "format_profile",
    "logical_membranes",
    "membrane_violations",
    "derive_triplet",
    "reinterpret_as_fusion_complex",
    "primitive_translations",
    "export_edge_list",
    "export_membranes",
]

CLASS_LABELS = ("yz", "zx", "xy")


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


@dataclass(eq=False)
class SyndromeGraph:
    type: str
    checks: np.ndarray  # cell id of each syndrome vertex
    edges: np.ndarray  # (E, 2) local check indices
    source: np.ndarray  # complex edge id of each syndrome edge
    crossing: np.ndarray | None = None  # (E, 3) parity of the wrap jump
    corner_cycles: list = field(default_factory=list, repr=False)

    @property
    def n_checks(self) -> int:
        return len(self.checks)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.reshape(-1), minlength=self.n_checks)

    def syndrome(self, edge_mask) -> np.ndarray:
        """Checks flipped by the edge set (boolean over checks)."""
        m = np.asarray(edge_mask, dtype=bool)
        flips = np.bincount(self.edges[m].reshape(-1), minlength=self.n_checks)
        return (flips & 1).astype(bool)

    def csr(self):
        """Adjacency as ``(indptr, neighbour, edge)`` arrays; loops appear twice."""
        E = self.n_edges
        a, b = self.edges[:, 0], self.edges[:, 1]
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        eid = np.concatenate([np.arange(E), np.arange(E)])
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(self.n_checks + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n_checks), out=indptr[1:])
        return indptr, dst[order].astype(np.int64), eid[order].astype(np.int64)

    def to_networkx(self):
        import networkx as nx

        G = nx.MultiGraph()
        G.add_nodes_from(range(self.n_checks))
        for i, (a, b) in enumerate(self.edges):
            G.add_edge(int(a), int(b), key=i, source=int(self.source[i]))
        return G


@dataclass(frozen=True)
class LogicalMembrane:
    type: str
    label: str
    edges: tuple[int, ...]

    def mask(self, n_edges: int) -> np.ndarray:
        m = np.zeros(n_edges, dtype=bool)
        m[list(self.edges)] = True
        return m


def _cell_edge_records(K: CellComplex):
    """Per complex edge: list of (cell, wrap of the edge inside that cell)."""
    rec: list[list] = [[] for _ in range(K.n_edges)]
    for c, edges in enumerate(K.cell_edges):
        for e, t in edges:
            rec[e].append((c, t))
    return rec


def _corner_edges(K: CellComplex, cells: Iterable[int]) -> list[list[int]]:
    """Edges of each listed cell grouped by the corner (vertex lift) they touch."""
    ev = K.edge_vertices
    sh = K.bd1.shift.reshape(-1, 2, 3)
    out = []
    for c in cells:
        groups: dict = {}
        for e, t in K.cell_edges[c]:
            for j in range(2):
                key = (int(ev[e, j]), _add(t, tuple(int(x) for x in sh[e, j])))
                groups.setdefault(key, []).append(e)
        out.extend(groups[k] for k in sorted(groups))
    return out


def build_syndrome_graphs(K: CellComplex, coloring: CellColoring | None = None):
    """The X and Z syndrome graphs of a bicolored fusion complex."""
    rep = validate_fusion_complex(K)
    if not rep.valid:
        raise InvalidComplex(rep.violations[0][2])
    if coloring is None:
        coloring = bicolor_cells(K)
    rec = _cell_edge_records(K)
    out = []
    for kind in "XZ":
        cells = np.array(coloring.members(kind), dtype=np.int64)
        local = {int(c): i for i, c in enumerate(cells)}
        E = K.n_edges
        edges = np.empty((E, 2), dtype=np.int64)
        cross = np.empty((E, 3), dtype=np.int8)
        for e in range(E):
            ends = [(c, t) for c, t in rec[e] if coloring[c] == kind]
            if len(ends) != 2:
                raise InvalidComplex(f"edge {e} lies in {len(ends)} {kind}-cells")
            (c1, t1), (c2, t2) = ends
            edges[e] = (local[c1], local[c2])
            cross[e] = [(a - b) & 1 for a, b in zip(t1, t2)]
        other = coloring.members("Z" if kind == "X" else "X")
        out.append(
            SyndromeGraph(kind, cells, edges, np.arange(E, dtype=np.int64), cross, _corner_edges(K, other))
        )
    return out[0], out[1]


# ----------------------------------------------------------------- profiles


def primitive_translations(K: CellComplex) -> int:
    """Number of unit-cell translations that map the embedded complex to itself.

    Only translations by vertex differences inside the first unit cell are
    tried.  Needs coordinates; returns 1 without them.
    """
    if K.coords is None or K.dims is None or K.template_size is None:
        return 1
    L = np.asarray(K.dims, dtype=float)
    pos = np.asarray(K.coords, dtype=float)
    nv0 = K.template_size[0]
    wrapk = lambda p: tuple(int(round(x * 1_000_000)) for x in np.mod(p, L))
    vset = {wrapk(p) for p in pos}

    def elements():
        ev = K.edge_vertices
        sh = K.bd1.shift.reshape(-1, 2, 3)
        for e in range(K.n_edges):
            yield [pos[ev[e, j]] + sh[e, j] * L for j in range(2)]
        for f in range(K.n_faces):
            pts = []
            for e, t in K.bd2.items(f):
                pts.extend(pos[ev[e, j]] + (np.add(t, sh[e, j])) * L for j in range(2))
            yield pts
        if K.bd3 is not None:
            for c in range(K.n_cells):
                yield [pos[v] + np.asarray(s) * L for v, s in K.cell_vertices[c]]

    def key(pts):
        ks = sorted({tuple(int(round(x * 1_000_000)) for x in p) for p in pts})
        base = np.asarray(ks[0], dtype=np.int64)
        Lk = (L * 1_000_000).round().astype(np.int64)
        shift = np.mod(base, Lk) - base
        return frozenset(tuple(int(a) for a in np.asarray(k) + shift) for k in ks)

    elems = [np.asarray(p) for p in elements()]
    keys = {key(p) for p in elems}
    count = 0
    for v in range(nv0):
        tau = pos[v] - pos[0]
        if any(wrapk(p + tau) not in vset for p in pos):
            continue
        if all(key(p + tau) in keys for p in elems):
            count += 1
    return max(count, 1)


def format_profile(counts: Counter, sep: str = "×") -> str:
    parts = []
    for d in sorted(counts):
        n = counts[d]
        parts.append(f"{d}" if n == 1 else f"{n}{sep}{d}")
    return "+".join(parts)


def check_profiles(K: CellComplex, coloring: CellColoring | None = None):
    """Check degrees (C) and resource sizes (R) per primitive cell.

    Returns ``(C, R)`` as Counters of degree -> multiplicity.  Multiplicities
    are divided by the number of primitive cells in the torus when the
    complex is an embedded instantiation, otherwise by their common gcd.
    """
    if coloring is None:
        coloring = bicolor_cells(K)
    C = Counter(len(edges) for edges in K.cell_edges)
    R = Counter(int(d) for d in K.vertex_degree)
    cells = None
    if K.dims is not None and K.coords is not None and K.template_size is not None:
        cells = int(np.prod(K.dims)) * primitive_translations(K)
        if any(m % cells for m in list(C.values()) + list(R.values())):
            cells = None
    if cells is None:
        cells = math.gcd(*C.values(), *R.values())
    return (
        Counter({d: m // cells for d, m in C.items()}),
        Counter({d: m // cells for d, m in R.items()}),
    )


# ---------------------------------------------------------------- membranes


def membrane_violations(g: SyndromeGraph, edge_sets, checks_of_type: list[list[int]] | None = None):
    """Reasons why the given edge sets fail to be independent logical membranes.

    Each must meet every opposite-type corner cycle evenly, and together they
    must be independent modulo the same-type check stars.
    """
    bad = []
    masks = [np.zeros(g.n_edges, dtype=bool) for _ in edge_sets]
    for m, es in zip(masks, edge_sets):
        m[list(es)] = True
    for i, m in enumerate(masks):
        for cyc in g.corner_cycles:
            if int(np.count_nonzero(m[cyc])) & 1:
                bad.append(f"membrane {i} meets a corner cycle oddly")
                break
    stars = Basis(_stars(g))
    before = len(stars)
    for m in masks:
        stars.add(_mask_bits(m))
    if len(stars) - before != len(masks):
        bad.append("membranes are dependent modulo check boundaries")
    return bad


def _mask_bits(m) -> int:
    idx = np.flatnonzero(m)
    v = 0
    for i in idx.tolist():
        v ^= 1 << i
    return v


def _stars(g: SyndromeGraph) -> list[int]:
    # a self-loop enters its check's star twice and cancels
    star = [0] * g.n_checks
    for e, (a, b) in enumerate(g.edges.tolist()):
        star[a] ^= 1 << e
        star[b] ^= 1 << e
    return star


def _kernel_membranes(g: SyndromeGraph) -> list[int]:
    """Three GF(2) representatives of (cycle-orthogonal sets) / (check stars)."""
    E = g.n_edges
    # rows: corner cycles; we need x with <row, x> = 0 for all rows
    rows = Basis()
    for cyc in g.corner_cycles:
        v = 0
        for e in cyc:
            v ^= 1 << e
        rows.add(v)
    red = rows.reduced_rows()
    pivots = [(r & -r).bit_length() - 1 for r in red]
    pivset = set(pivots)
    kernel = []
    for j in range(E):
        if j in pivset:
            continue
        v = 1 << j
        for p, r in zip(pivots, red):
            if (r >> j) & 1:
                v |= 1 << p
        kernel.append(v)
    stars = Basis(_stars(g))
    out = []
    for v in kernel:
        if stars.add(v):
            out.append(v)
    return out


def logical_membranes(K: CellComplex, coloring: CellColoring | None, type: str, graph: SyndromeGraph | None = None):
    """Three membranes of the given type, one per torus 2-cycle class."""
    if graph is None:
        gx, gz = build_syndrome_graphs(K, coloring)
        graph = gx if type == "X" else gz
    g = graph
    if g.crossing is not None and g.crossing.any():
        mems = [
            LogicalMembrane(type, CLASS_LABELS[i], tuple(np.flatnonzero(g.crossing[:, i]).tolist()))
            for i in range(3)
        ]
        bad = membrane_violations(g, [m.edges for m in mems])
        if bad:
            raise HomologyRankUnexpected("; ".join(bad))
        return mems
    # no wraps recorded: fall back to linear algebra, classes unlabeled
    reps = _kernel_membranes(g)
    if len(reps) != 3:
        raise HomologyRankUnexpected(f"homology rank {len(reps)} instead of 3")
    return [
        LogicalMembrane(type, f"h{i}", tuple(j for j in range(g.n_edges) if (v >> j) & 1))
        for i, v in enumerate(reps)
    ]


# ------------------------------------------------------------------ triplet


@dataclass(eq=False)
class TripletComplexes:
    r_complex: CellComplex
    x_complex: CellComplex
    z_complex: CellComplex
    # face i of every member corresponds to edge i of the fusion complex
    face_map: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    source: CellComplex | None = None

    def member(self, which: str) -> CellComplex:
        return {"R": self.r_complex, "X": self.x_complex, "Z": self.z_complex}[which]


def _homology_complex(K: CellComplex, coloring: CellColoring, kind: str) -> CellComplex:
    """Vertices: opposite-type cells then complex vertices; faces: complex edges; cells: ``kind`` cells."""
    other = "Z" if kind == "X" else "X"
    ocells = coloring.members(other)
    onum = {c: i for i, c in enumerate(ocells)}
    nO = len(ocells)
    ev = K.edge_vertices
    sh = K.bd1.shift.reshape(-1, 2, 3)
    corner_id: dict = {}
    corner_rows = []

    def corner(z, v, s):
        key = (z, v, s)
        if key not in corner_id:
            corner_id[key] = len(corner_rows)
            corner_rows.append([(onum[z], (0, 0, 0)), (nO + v, s)])
        return corner_id[key]

    rec = _cell_edge_records(K)
    faces = []
    for e in range(K.n_edges):
        zs = [(c, t) for c, t in rec[e] if coloring[c] == other]
        if len(zs) != 2:
            raise InvalidComplex(f"edge {e} lies in {len(zs)} {other}-cells")
        v0, v1 = int(ev[e, 0]), int(ev[e, 1])
        s0 = tuple(int(x) for x in sh[e, 0])
        s1 = tuple(int(x) for x in sh[e, 1])
        (z1, t1), (z2, t2) = zs
        m1 = tuple(-x for x in t1)
        m2 = tuple(-x for x in t2)
        faces.append([
            (corner(z1, v0, _add(s0, t1)), m1),
            (corner(z1, v1, _add(s1, t1)), m1),
            (corner(z2, v1, _add(s1, t2)), m2),
            (corner(z2, v0, _add(s0, t2)), m2),
        ])
    cells = [K.cell_edges[c] for c in coloring.members(kind)]
    return CellComplex(
        name=f"{kind}-homology({K.name})",
        n_vertices=nO + K.n_vertices,
        bd1=Incidence.from_rows(corner_rows),
        bd2=Incidence.from_rows(faces),
        bd3=Incidence.from_rows(cells),
        dims=K.dims,
        labels={"vertex_kind": [other] * nO + ["V"] * K.n_vertices, "cells": coloring.members(kind)},
    )


def derive_triplet(K: CellComplex, coloring: CellColoring | None = None) -> TripletComplexes:
    rep = validate_fusion_complex(K)
    if not rep.valid:
        raise InvalidComplex(rep.violations[0][2])
    if coloring is None:
        coloring = bicolor_cells(K)
    return TripletComplexes(
        r_complex=dualize(K),
        x_complex=_homology_complex(K, coloring, "X"),
        z_complex=_homology_complex(K, coloring, "Z"),
        face_map=np.arange(K.n_edges, dtype=np.int64),
        source=K,
    )


def reinterpret_as_fusion_complex(t: TripletComplexes, which: str) -> CellComplex:
    """Treat member ``which`` as the resource-homology complex of a new protocol."""
    if which not in ("R", "X", "Z"):
        raise ValueError(f"which must be R, X or Z, not {which!r}")
    D = dualize(t.member(which))
    return CellComplex(
        name=f"reinterpret-{which}({t.source.name if t.source else 'triplet'})",
        n_vertices=D.n_vertices,
        bd1=D.bd1,
        bd2=D.bd2,
        bd3=D.bd3,
        dims=D.dims,
    )


# ------------------------------------------------------------------- export


def export_edge_list(g: SyndromeGraph) -> str:
    """Lines ``edge_id check_a check_b complex_edge_id``."""
    lines = [f"# {g.type} syndrome graph: {g.n_checks} checks, {g.n_edges} edges"]
    for i, (a, b) in enumerate(g.edges.tolist()):
        lines.append(f"{i} {a} {b} {int(g.source[i])}")
    return "\n".join(lines) + "\n"


def export_membranes(mems) -> str:
    lines = []
    for m in mems:
        lines.append(f"{m.type} {m.label} " + " ".join(map(str, m.edges)))
    return "\n".join(lines) + "\n"
