"""Explicit finite cell complexes on the 3-torus.

Every boundary map is stored as a CSR-style :class:`Incidence`.  Besides the
child index, each incidence carries an integer *wrap* vector: the number of
times the child's lift is displaced around the torus relative to the
parent's lift.  Wraps are what make homology (logical membranes) computable
without coordinates, and they let small tori carry multiple incidences
between the same pair of elements.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DimsTooSmall, InvalidComplex, MalformedTemplate, NotBicolorable

__all__ = [
    "Incidence",
    "CellComplex",
    "UnitCellTemplate",
    "CellColoring",
    "ValidationReport",
    "instantiate",
    "validate_fusion_complex",
    "dual_faces_quadrilateral",
    "boundary_of_boundary",
    "bicolor_cells",
    "bicolor_vertices",
    "dualize",
    "euler_characteristic",
    "is_isomorphic",
    "order_cycle",
]

ZERO3 = (0, 0, 0)


@dataclass(frozen=True, eq=False)
class Incidence:
    indptr: np.ndarray
    index: np.ndarray
    shift: np.ndarray

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[tuple[int, Sequence[int]]]]) -> "Incidence":
        lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=len(rows))
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        nnz = int(indptr[-1])
        index = np.empty(nnz, dtype=np.int64)
        shift = np.zeros((nnz, 3), dtype=np.int64)
        k = 0
        for r in rows:
            for child, s in r:
                index[k] = child
                shift[k] = s
                k += 1
        return cls(indptr, index, shift)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    def row(self, i: int) -> np.ndarray:
        return self.index[self.indptr[i]:self.indptr[i + 1]]

    def row_shift(self, i: int) -> np.ndarray:
        return self.shift[self.indptr[i]:self.indptr[i + 1]]

    def items(self, i: int) -> list[tuple[int, tuple[int, int, int]]]:
        a, b = self.indptr[i], self.indptr[i + 1]
        return [(int(c), tuple(int(x) for x in s)) for c, s in zip(self.index[a:b], self.shift[a:b])]

    def lengths(self) -> np.ndarray:
        return np.diff(self.indptr)

    def transpose(self, n_children: int) -> "Incidence":
        """Coboundary map; wraps are negated so they stay parent-relative."""
        parent = np.repeat(np.arange(self.n, dtype=np.int64), self.lengths())
        order = np.argsort(self.index, kind="stable")
        counts = np.bincount(self.index, minlength=n_children)
        indptr = np.zeros(n_children + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return Incidence(indptr, parent[order], -self.shift[order])


@dataclass(frozen=True, eq=False)
class CellComplex:
    """Explicit cell complex: vertices, edges, faces and (for 3d) cells."""

    name: str
    n_vertices: int
    bd1: Incidence
    bd2: Incidence
    bd3: Incidence | None = None
    dims: tuple[int, int, int] | None = None
    coords: np.ndarray | None = None
    # template-local index of each element per dimension, if instantiated
    template_size: tuple[int, ...] | None = None
    # optional provenance of elements, e.g. which parent element each came from
    labels: dict | None = None

    @property
    def dim(self) -> int:
        return 2 if self.bd3 is None else 3

    @property
    def n_edges(self) -> int:
        return self.bd1.n

    @property
    def n_faces(self) -> int:
        return self.bd2.n

    @property
    def n_cells(self) -> int:
        return 0 if self.bd3 is None else self.bd3.n

    @property
    def counts(self) -> tuple[int, ...]:
        c = (self.n_vertices, self.n_edges, self.n_faces)
        return c if self.bd3 is None else c + (self.n_cells,)

    @cached_property
    def edge_vertices(self) -> np.ndarray:
        ev = self.bd1.index.reshape(-1, 2)
        return ev

    @cached_property
    def vertex_edges(self) -> Incidence:
        return self.bd1.transpose(self.n_vertices)

    @cached_property
    def edge_faces(self) -> Incidence:
        return self.bd2.transpose(self.n_edges)

    @cached_property
    def face_cells(self) -> Incidence:
        if self.bd3 is None:
            raise InvalidComplex("2d complex has no cells")
        return self.bd3.transpose(self.n_faces)

    @cached_property
    def cell_edges(self) -> list[list[tuple[int, tuple[int, int, int]]]]:
        """Edges of each cell with the wrap of the edge inside the cell.

        An edge lift bounded by two faces of the cell is counted once.
        """
        out = []
        for c in range(self.n_cells):
            cnt: Counter = Counter()
            for f, s in self.bd3.items(c):
                for e, t in self.bd2.items(f):
                    cnt[(e, (s[0] + t[0], s[1] + t[1], s[2] + t[2]))] += 1
            out.append(sorted(k for k, m in cnt.items() for _ in range(m // 2)))
        return out

    @cached_property
    def cell_vertices(self) -> list[list[tuple[int, tuple[int, int, int]]]]:
        """Distinct vertex lifts (corners) of each cell."""
        ev = self.edge_vertices
        sh = self.bd1.shift.reshape(-1, 2, 3)
        out = []
        for c in range(self.n_cells):
            seen = set()
            for e, t in self.cell_edges[c]:
                for j in range(2):
                    s = sh[e, j]
                    seen.add((int(ev[e, j]), (t[0] + int(s[0]), t[1] + int(s[1]), t[2] + int(s[2]))))
            out.append(sorted(seen))
        return out

    @cached_property
    def vertex_degree(self) -> np.ndarray:
        return np.bincount(self.bd1.index, minlength=self.n_vertices)

    def face_sizes(self) -> np.ndarray:
        return self.bd2.lengths()

    def summary(self) -> dict:
        d = {"name": self.name, "dims": list(self.dims) if self.dims else None}
        keys = ["V", "E", "F", "C"][: len(self.counts)]
        d.update(dict(zip(keys, map(int, self.counts))))
        return d


@dataclass(frozen=True)
class UnitCellTemplate:
    """Periodic template: elements reference children with unit-cell offsets."""

    name: str
    vertices: tuple
    edges: tuple  # ((v, off), (v, off))
    faces: tuple  # ((e, off), ...) cyclically ordered
    cells: tuple = ()  # ((f, off), ...)
    coords: tuple | None = None
    dim: int = 3

    def __post_init__(self):
        self.check()

    def check(self) -> None:
        nv, ne, nf = len(self.vertices), len(self.edges), len(self.faces)

        def ref(kind, i, lab, off, bound):
            if not (isinstance(lab, (int, np.integer)) and 0 <= lab < bound):
                raise MalformedTemplate(f"{kind} {i} references missing element {lab!r}")
            if len(off) != 3 or not all(isinstance(x, (int, np.integer)) for x in off):
                raise MalformedTemplate(f"{kind} {i} has non-integer offset {off!r}")

        for i, e in enumerate(self.edges):
            if len(e) != 2:
                raise MalformedTemplate(f"edge {i} must have two endpoints")
            for v, off in e:
                ref("edge", i, v, off, nv)
        for i, f in enumerate(self.faces):
            if not f:
                raise MalformedTemplate(f"face {i} is empty")
            par: Counter = Counter()
            for e, off in f:
                ref("face", i, e, off, ne)
                for v, o in self.edges[e]:
                    par[(v, tuple(a + b for a, b in zip(off, o)))] ^= 1
            if any(par.values()):
                raise MalformedTemplate(f"face {i} edge cycle is not closed")
        for i, c in enumerate(self.cells):
            par = Counter()
            for f, off in c:
                ref("cell", i, f, off, nf)
                for e, o in self.faces[f]:
                    par[(e, tuple(a + b for a, b in zip(off, o)))] ^= 1
            if any(par.values()):
                raise MalformedTemplate(f"cell {i} face set is not closed")

    @property
    def counts(self) -> tuple[int, ...]:
        c = (len(self.vertices), len(self.edges), len(self.faces))
        return c if self.dim == 2 else c + (len(self.cells),)


@dataclass(frozen=True)
class CellColoring:
    kind: str  # "cells", "vertices" or "vertices3"
    assignment: tuple[str, ...]

    def members(self, color: str) -> list[int]:
        return [i for i, c in enumerate(self.assignment) if c == color]

    def __getitem__(self, i: int) -> str:
        return self.assignment[i]

    def __len__(self) -> int:
        return len(self.assignment)


@dataclass
class ValidationReport:
    valid: bool
    violations: list[tuple[int, str, str]] = field(default_factory=list)
    undecided: bool = False
    info: dict = field(default_factory=dict)

    @classmethod
    def from_violations(cls, violations, **info) -> "ValidationReport":
        return cls(not violations, list(violations), info=info)

    def __bool__(self) -> bool:
        return self.valid


# --------------------------------------------------------------------- build


def _unroll(rows, n_child: int, dims: tuple[int, int, int]) -> Incidence:
    L = np.asarray(dims, dtype=np.int64)
    P = int(np.prod(L))
    child = np.array([c for r in rows for c, _ in r], dtype=np.int64)
    off = np.array([o for r in rows for _, o in r], dtype=np.int64).reshape(-1, 3)
    lengths = np.array([len(r) for r in rows], dtype=np.int64)
    grid = np.stack(np.unravel_index(np.arange(P), tuple(dims)), axis=1).astype(np.int64)
    q = grid[:, None, :] + off[None, :, :]
    wrap = np.floor_divide(q, L)
    qm = q - wrap * L
    cidx = (qm[..., 0] * L[1] + qm[..., 1]) * L[2] + qm[..., 2]
    index = (cidx * n_child + child[None, :]).reshape(-1)
    all_len = np.tile(lengths, P)
    indptr = np.zeros(len(all_len) + 1, dtype=np.int64)
    np.cumsum(all_len, out=indptr[1:])
    return Incidence(indptr, index, wrap.reshape(-1, 3))


def instantiate(template: UnitCellTemplate, dims: Sequence[int]) -> CellComplex:
    """Unroll a periodic template onto an ``Lx × Ly × Lz`` torus.

    Elements are numbered by unit cell in row-major (x, y, z) order and then
    by template-local index.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or min(dims) < 2:
        raise DimsTooSmall(f"torus dims must all be >= 2, got {dims}")
    nv, ne, nf = (len(template.vertices), len(template.edges), len(template.faces))
    bd1 = _unroll([list(e) for e in template.edges], nv, dims)
    bd2 = _unroll([list(f) for f in template.faces], ne, dims)
    bd3 = None
    if template.dim == 3:
        bd3 = _unroll([list(c) for c in template.cells], nf, dims)
    coords = None
    if template.coords is not None:
        P = int(np.prod(dims))
        grid = np.stack(np.unravel_index(np.arange(P), dims), axis=1)
        tc = np.asarray(template.coords, dtype=float)
        coords = (grid[:, None, :] + tc[None, :, :]).reshape(-1, 3)
    return CellComplex(
        name=template.name,
        n_vertices=nv * int(np.prod(dims)),
        bd1=bd1,
        bd2=bd2,
        bd3=bd3,
        dims=dims,
        coords=coords,
        template_size=template.counts,
    )


# ---------------------------------------------------------------- predicates


def boundary_of_boundary(K: CellComplex) -> list[tuple[int, str, str]]:
    """Violations of ∂∘∂ = 0 over GF(2), counted on lifts."""
    bad = []
    ev = K.edge_vertices
    sh = K.bd1.shift.reshape(-1, 2, 3)
    for f in range(K.n_faces):
        par: Counter = Counter()
        for e, t in K.bd2.items(f):
            for j in range(2):
                par[(int(ev[e, j]), tuple(np.add(t, sh[e, j]).tolist()))] ^= 1
        if any(par.values()):
            bad.append((f, "dd2", f"face {f} boundary is not a cycle"))
    for c in range(K.n_cells):
        par = Counter()
        for f, s in K.bd3.items(c):
            for e, t in K.bd2.items(f):
                par[(e, (s[0] + t[0], s[1] + t[1], s[2] + t[2]))] ^= 1
        if any(par.values()):
            bad.append((c, "dd3", f"cell {c} boundary is not closed"))
    return bad


def validate_fusion_complex(K: CellComplex) -> ValidationReport:
    """Every edge must have exactly four incident faces (with multiplicity)."""
    deg = np.bincount(K.bd2.index, minlength=K.n_edges)
    bad = [
        (int(e), "edge-four-faces", f"edge {e} has {int(d)} incident faces")
        for e, d in enumerate(deg)
        if d != 4
    ]
    return ValidationReport.from_violations(bad)


def dual_faces_quadrilateral(K: CellComplex) -> bool:
    """Filter rule evaluated on the dual: all dual faces have four sides."""
    D = dualize(K)
    sizes = D.face_sizes()
    return bool(np.all(sizes == 4))


def _two_color(n: int, adj: list[list[int]], names: tuple[str, str], what: str) -> tuple[str, ...]:
    color = [-1] * n
    for s in range(n):
        if color[s] >= 0:
            continue
        color[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    dq.append(w)
                elif color[w] == color[u]:
                    raise NotBicolorable(f"odd cycle through {what} {u} and {w}")
    return tuple(names[c] for c in color)


def bicolor_cells(K: CellComplex) -> CellColoring:
    """Canonical proper X/Z coloring of cells under face adjacency."""
    fc = K.face_cells
    adj: list[list[int]] = [[] for _ in range(K.n_cells)]
    for f in range(K.n_faces):
        cs = fc.row(f)
        if len(cs) != 2:
            raise InvalidComplex(f"face {f} borders {len(cs)} cells")
        a, b = int(cs[0]), int(cs[1])
        adj[a].append(b)
        adj[b].append(a)
    return CellColoring("cells", _two_color(K.n_cells, adj, ("X", "Z"), "cells"))


def bicolor_vertices(K: CellComplex) -> CellColoring:
    adj: list[list[int]] = [[] for _ in range(K.n_vertices)]
    for a, b in K.edge_vertices:
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    return CellColoring("vertices", _two_color(K.n_vertices, adj, ("A", "B"), "vertices"))


def euler_characteristic(K: CellComplex) -> int:
    c = K.counts
    return int(sum((-1) ** i * n for i, n in enumerate(c)))


# ---------------------------------------------------------------------- dual


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _neg(a):
    return (-a[0], -a[1], -a[2])


def order_cycle(ends: Sequence[tuple]) -> list[int] | None:
    """Order items so consecutive ones share an endpoint key.

    ``ends[i]`` is a pair of hashable endpoint keys.  Returns the visiting
    order of a single closed walk, or ``None`` if the items do not form one.
    """
    m = len(ends)
    if m == 0:
        return []
    at: dict = {}
    for i, (a, b) in enumerate(ends):
        at.setdefault(a, []).append(i)
        at.setdefault(b, []).append(i)
    used = [False] * m
    order = [0]
    used[0] = True
    cur = ends[0][1]
    start = ends[0][0]
    for _ in range(m - 1):
        nxt = None
        for j in at.get(cur, ()):
            if not used[j]:
                nxt = j
                break
        if nxt is None:
            return None
        used[nxt] = True
        order.append(nxt)
        a, b = ends[nxt]
        cur = b if a == cur else a
    if cur != start:
        return None
    return order


def dualize(K: CellComplex) -> CellComplex:
    """Poincaré dual: cells↔vertices and faces↔edges."""
    if K.dim != 3:
        raise InvalidComplex("dualize expects a 3d complex")
    fc = K.face_cells
    ef = K.edge_faces
    ve = K.vertex_edges
    # dual edge per face: its two cells, wraps relative to the face
    d1 = []
    for f in range(K.n_faces):
        items = fc.items(f)
        if len(items) != 2:
            raise InvalidComplex(f"face {f} borders {len(items)} cells")
        d1.append(items)
    # dual face per edge: faces around it, cyclically ordered via shared cells
    d2 = []
    for e in range(K.n_edges):
        items = ef.items(e)
        ends = []
        for f, t in items:
            a, b = d1[f]
            ends.append(((a[0], _add(a[1], t)), (b[0], _add(b[1], t))))
        order = order_cycle(ends)
        if order is not None:
            items = [items[i] for i in order]
        d2.append(items)
    d3 = [ve.items(v) for v in range(K.n_vertices)]
    coords = None
    return CellComplex(
        name=f"dual({K.name})",
        n_vertices=K.n_cells,
        bd1=Incidence.from_rows(d1),
        bd2=Incidence.from_rows(d2),
        bd3=Incidence.from_rows(d3),
        dims=K.dims,
        coords=coords,
    )


# --------------------------------------------------------------- isomorphism


def hasse_graph(K: CellComplex):
    import networkx as nx

    G = nx.Graph()
    sizes = K.counts
    for k, n in enumerate(sizes):
        G.add_nodes_from(((k, i) for i in range(n)), dim=k)
    maps = [K.bd1, K.bd2] + ([K.bd3] if K.bd3 is not None else [])
    for k, bd in enumerate(maps, start=1):
        for i in range(bd.n):
            for c, m in Counter(bd.row(i).tolist()).items():
                G.add_edge((k, i), (k - 1, c), mult=m)
    return G


def _profile(K: CellComplex):
    maps = [K.bd1, K.bd2] + ([K.bd3] if K.bd3 is not None else [])
    prof = [K.counts]
    for bd in maps:
        prof.append(sorted(Counter(bd.lengths().tolist()).items()))
        prof.append(sorted(Counter(np.bincount(bd.index).tolist()).items()))
    return prof


def _labeled_hasse(K: CellComplex):
    """Hasse graph as ``(labels, adjacency)``; multiplicities become subdivision nodes."""
    G = hasse_graph(K)
    index = {v: i for i, v in enumerate(G.nodes)}
    labels = [f"d{d['dim']}" for _, d in G.nodes(data=True)]
    adj: list[list[int]] = [[] for _ in labels]
    for a, b, d in G.edges(data=True):
        ia, ib = index[a], index[b]
        if d["mult"] != 1:
            m = len(labels)
            labels.append(f"m{d['mult']}")
            adj.append([])
            adj[ia].append(m)
            adj[m].append(ia)
            ia = m
        adj[ia].append(ib)
        adj[ib].append(ia)
    return labels, adj


def _refine(colors: list[int], adj: list[list[int]]) -> list[int]:
    """Colour refinement to the coarsest stable partition, canonically relabelled."""
    n_classes = len(set(colors))
    while True:
        sig = [(colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(len(adj))]
        table = {s: i for i, s in enumerate(sorted(set(sig)))}
        colors = [table[s] for s in sig]
        if len(table) == n_classes:
            return colors
        n_classes = len(table)


def is_isomorphic(K1: CellComplex, K2: CellComplex) -> bool:
    """Exact combinatorial isomorphism of the incidence (Hasse) graphs.

    Individualization-refinement on the disjoint union of both graphs:
    refine colours, branch on the smallest ambiguous class, and accept a
    discrete colouring only after checking that it maps edges to edges.
    """
    if K1.dim != K2.dim or _profile(K1) != _profile(K2):
        return False
    lab1, adj1 = _labeled_hasse(K1)
    lab2, adj2 = _labeled_hasse(K2)
    n = len(lab1)
    if len(lab2) != n:
        return False
    adj = adj1 + [[w + n for w in row] for row in adj2]
    names = {x: i for i, x in enumerate(sorted(set(lab1) | set(lab2)))}
    start = [names[x] for x in lab1 + lab2]
    edges2 = {(a, b) for a, row in enumerate(adj2) for b in row}

    def balanced(colors):
        c1 = Counter(colors[:n])
        return c1 == Counter(colors[n:])

    def search(colors) -> bool:
        colors = _refine(colors, adj)
        if not balanced(colors):
            return False
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            groups.setdefault(c, []).append(v)
        ambiguous = [g for g in groups.values() if len(g) > 2]
        if not ambiguous:
            partner = {}
            for g in groups.values():
                partner[g[0]] = g[1] - n
            return all((partner[a], partner[b]) in edges2 for a, row in enumerate(adj1) for b in row)
        cls = min(ambiguous, key=len)
        v = cls[0]
        fresh = max(colors) + 1
        for w in cls:
            if w < n:
                continue
            trial = list(colors)
            trial[v] = trial[w] = fresh
            if search(trial):
                return True
        return False

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10_000))
    try:
        return search(start)
    finally:
        sys.setrecursionlimit(old)
