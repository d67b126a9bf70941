"""Two-dimensional surface codes on closed surfaces.

Two representations are in use.  In the Kitaev form qubits sit on edges,
with vertex and face stabilizers.  In the plaquette form qubits sit on
4-valent vertices and the 2-colored faces are the X and Z stabilizers.
:func:`medial_plaquette` converts the first into the second, and
:func:`boundary_membrane` cuts the membrane left behind by a region of a
fusion complex.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .complex import (
    CellColoring,
    CellComplex,
    Incidence,
    ValidationReport,
    _two_color,
    dualize,
    order_cycle,
)
from .errors import EmptyRegion, FullRegion, InvalidComplex, NotAClosedSurface, NotBicolorable
from .stab import GeneratorSet, PauliWord

__all__ = [
    "surface_dual",
    "medial_plaquette",
    "boundary_membrane",
    "validate_surface_code",
    "color_faces",
    "plaquette_stabilizers",
]

Z3 = (0, 0, 0)


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _require_2d(M: CellComplex) -> None:
    if M.dim != 2:
        raise InvalidComplex("expected a 2d complex")
    deg = np.bincount(M.bd2.index, minlength=M.n_edges)
    bad = np.flatnonzero(deg != 2)
    if bad.size:
        e = int(bad[0])
        raise NotAClosedSurface(f"edge {e} lies on {int(deg[e])} faces")


def surface_dual(M: CellComplex) -> CellComplex:
    """Dual of a closed surface: faces become vertices and vice versa."""
    _require_2d(M)
    ef = M.edge_faces
    d1 = [ef.items(e) for e in range(M.n_edges)]
    d2 = []
    ve = M.vertex_edges
    for v in range(M.n_vertices):
        items = ve.items(v)
        ends = [((d1[e][0][0], _add(d1[e][0][1], t)), (d1[e][1][0], _add(d1[e][1][1], t))) for e, t in items]
        order = order_cycle(ends)
        if order is None:
            raise NotAClosedSurface(f"link of vertex {v} is not a single cycle")
        d2.append([items[i] for i in order])
    return CellComplex(
        name=f"dual({M.name})",
        n_vertices=M.n_faces,
        bd1=Incidence.from_rows(d1),
        bd2=Incidence.from_rows(d2),
        dims=M.dims,
    )


def _face_walk(M: CellComplex, f: int):
    """Vertex lifts visited by face ``f``: ``corner[i]`` joins item i and i+1."""
    items = M.bd2.items(f)
    ev = M.edge_vertices
    sh = M.bd1.shift.reshape(-1, 2, 3)

    def ends(k):
        e, t = items[k]
        return [(int(ev[e, j]), _add(t, tuple(int(x) for x in sh[e, j]))) for j in range(2)]

    first, last = ends(0), ends(len(items) - 1)
    cur = first[0] if first[0] in last else first[1]
    corners = []
    for k in range(len(items)):
        a, b = ends(k)
        if cur == a:
            cur = b
        elif cur == b:
            cur = a
        else:
            raise NotAClosedSurface(f"face {f} boundary is not a walk")
        corners.append(cur)
    return items, corners


def medial_plaquette(M: CellComplex) -> CellComplex:
    """Plaquette form of the Kitaev code on ``M``: the medial complex.

    One vertex per edge of ``M``; one edge per corner (a face turning at a
    vertex); one face per face of ``M`` followed by one per vertex of ``M``.
    """
    _require_2d(M)
    corner_rows = []  # medial edge endpoints
    fface = []
    at_vertex: dict[int, list] = {v: [] for v in range(M.n_vertices)}
    for f in range(M.n_faces):
        items, corners = _face_walk(M, f)
        row = []
        m = len(items)
        for k in range(m):
            (e1, t1), (e2, t2) = items[k], items[(k + 1) % m]
            me = len(corner_rows)
            corner_rows.append([(e1, t1), (e2, t2)])
            row.append((me, Z3))
            v, tv = corners[k]
            at_vertex[v].append((me, _sub(Z3, tv)))
        fface.append(row)
    vface = []
    for v in range(M.n_vertices):
        items = at_vertex[v]
        if not items:
            raise NotAClosedSurface(f"vertex {v} has no corners")
        ends = [tuple((e, _add(t, s)) for e, t in corner_rows[me]) for me, s in items]
        order = order_cycle(ends)
        if order is None:
            raise NotAClosedSurface(f"link of vertex {v} is not a single cycle")
        vface.append([items[i] for i in order])
    return CellComplex(
        name=f"medial({M.name})",
        n_vertices=M.n_edges,
        bd1=Incidence.from_rows(corner_rows),
        bd2=Incidence.from_rows(fface + vface),
        dims=M.dims,
    )


def boundary_membrane(K: CellComplex, region) -> CellComplex:
    """Membrane around a vertex region of a fusion complex.

    The membrane lives in the dual complex: one square face per edge of
    ``K`` with exactly one endpoint in ``region``; its edges are the faces
    of ``K`` and its vertices the cells of ``K``.  This is the Kitaev-form
    code left on the boundary; :func:`surface_dual` gives the plaquette form.
    """
    inside = np.zeros(K.n_vertices, dtype=bool)
    idx = np.asarray(sorted(set(int(v) for v in region)), dtype=np.int64)
    if idx.size == 0:
        raise EmptyRegion("region is empty")
    inside[idx] = True
    if inside.all():
        raise FullRegion("region contains every vertex")
    ev = K.edge_vertices
    cut = np.flatnonzero(inside[ev[:, 0]] != inside[ev[:, 1]])
    R = dualize(K)
    rows = [R.bd2.items(int(e)) for e in cut]
    used_e = sorted({d for row in rows for d, _ in row})
    enum = {d: i for i, d in enumerate(used_e)}
    e_rows = [R.bd1.items(d) for d in used_e]
    used_v = sorted({c for row in e_rows for c, _ in row})
    vnum = {c: i for i, c in enumerate(used_v)}
    return CellComplex(
        name=f"membrane({K.name})",
        n_vertices=len(used_v),
        bd1=Incidence.from_rows([[(vnum[c], s) for c, s in row] for row in e_rows]),
        bd2=Incidence.from_rows([[(enum[d], s) for d, s in row] for row in rows]),
        dims=K.dims,
        labels={"faces": cut.tolist(), "edges": used_e, "vertices": used_v},
    )


def color_faces(P: CellComplex) -> CellColoring:
    """Two-color the faces of a surface so neighbours across edges differ."""
    _require_2d(P)
    ef = P.edge_faces
    adj: list[list[int]] = [[] for _ in range(P.n_faces)]
    for e in range(P.n_edges):
        a, b = (int(x) for x in ef.row(e))
        adj[a].append(b)
        adj[b].append(a)
    return CellColoring("faces", _two_color(P.n_faces, adj, ("X", "Z"), "faces"))


def validate_surface_code(P: CellComplex) -> ValidationReport:
    """Plaquette-form conditions: closed surface, 4-valent vertices, 2-colorable faces."""
    bad = []
    try:
        _require_2d(P)
    except NotAClosedSurface as exc:
        return ValidationReport(False, [(-1, "closed-surface", str(exc))])
    for v, d in enumerate(P.vertex_degree):
        if d != 4:
            bad.append((v, "four-valent", f"vertex {v} has degree {int(d)}"))
    info = {}
    try:
        info["coloring"] = color_faces(P)
    except NotBicolorable as exc:
        bad.append((-1, "face-two-coloring", str(exc)))
    return ValidationReport(not bad, bad, info=info)


def plaquette_stabilizers(P: CellComplex, coloring: CellColoring | None = None) -> GeneratorSet:
    """X (Z) plaquettes on faces of the first (second) color; qubits are vertices."""
    if coloring is None:
        coloring = color_faces(P)
    n = P.n_vertices
    ev = P.edge_vertices
    gens, labels = [], []
    for f in range(P.n_faces):
        # vertex lifts on the face, each counted once
        vs = Counter()
        for e, t in P.bd2.items(f):
            sh = P.bd1.row_shift(e)
            for j in range(2):
                vs[(int(ev[e, j]), _add(t, tuple(int(x) for x in sh[j])))] += 1
        qubits = [v for v, _ in vs]
        gens.append(PauliWord.on(n, qubits, coloring[f]))
        labels.append(f"{coloring[f]}{f}")
    return GeneratorSet(n, tuple(gens), tuple(labels))
