"""Built-in periodic templates.

Each entry is described geometrically with integer coordinates on a
period-``P`` lattice: a list of cells, each a list of polygonal faces given
as vertex cycles.  :func:`template_from_polytopes` turns that into a
:class:`UnitCellTemplate` by reducing every element to a canonical
representative modulo the lattice.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from ..complex import UnitCellTemplate
from ..errors import UnknownName

__all__ = ["catalog", "catalog_names", "template_from_polytopes", "convex_hull_faces", "DSYMBOLS"]

DSYMBOLS = {
    "cubic": "<1 3:1,1,1,1:4,3,4>",
    "alternated-cubic": "<2 3:1 2,1 2,1 2,2:3 3,3 4,4>",
    "4-star": "<2 3:2,1 2,1 2,2:6,2 4,4>",
    "pyrochlore": "<4 3:1 2 3 4,1 2 4,1 3 4,2 4:3 3 6,3 3,4>",
}

Point = tuple[int, int, int]


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def convex_hull_faces(points: list[Point]) -> list[list[Point]]:
    """Facets of the convex hull of a small integer point set.

    Exact: supporting planes are found by brute force over point triples.
    Facet vertices are returned in cyclic order.
    """
    pts = list(dict.fromkeys(tuple(p) for p in points))
    facets: dict[frozenset, Point] = {}
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        nrm = _cross(_sub(pts[j], pts[i]), _sub(pts[k], pts[i]))
        if nrm == (0, 0, 0):
            continue
        d = _dot(nrm, pts[i])
        vals = [_dot(nrm, p) - d for p in pts]
        if all(v >= 0 for v in vals):
            nrm = (-nrm[0], -nrm[1], -nrm[2])
        elif not all(v <= 0 for v in vals):
            continue
        on = frozenset(idx for idx, v in enumerate(vals) if v == 0)
        facets.setdefault(on, nrm)
    out = []
    for on, nrm in facets.items():
        poly = [pts[i] for i in sorted(on)]
        out.append(_cyclic(poly, nrm))
    return out


def _cyclic(poly: list[Point], nrm: Point) -> list[Point]:
    cx = [sum(p[a] for p in poly) / len(poly) for a in range(3)]
    # in-plane frame
    u = _sub(poly[0], poly[1]) if len(poly) > 1 else (1, 0, 0)
    v = _cross(nrm, u)

    def ang(p):
        d = [p[a] - cx[a] for a in range(3)]
        return math.atan2(sum(d[a] * v[a] for a in range(3)), sum(d[a] * u[a] for a in range(3)))

    return sorted(poly, key=ang)


def _floordiv(p, P):
    return tuple(p[a] // P[a] for a in range(3))


def _home(points, P):
    return _floordiv(min(points), P)


def _shift(p, h, P, sign=-1):
    return tuple(p[a] + sign * h[a] * P[a] for a in range(3))


def template_from_polytopes(name: str, period, cells: list[list[list[Point]]]) -> UnitCellTemplate:
    """Build a template from cells given as lists of face vertex cycles.

    ``cells`` needs one representative per translation class; duplicates are
    merged.  Faces are identified by their vertex sets.
    """
    P = (period,) * 3 if isinstance(period, int) else tuple(period)
    vlab: dict[Point, int] = {}
    elab: dict[tuple, int] = {}
    flab: dict[frozenset, int] = {}
    clab: dict[frozenset, int] = {}
    edges, faces, cell_rows = [], [], []

    def vertex(p):
        h = _floordiv(p, P)
        q = _shift(p, h, P)
        if q not in vlab:
            vlab[q] = len(vlab)
        return vlab[q], h

    def edge(a, b):
        a, b = sorted((a, b))
        h = _floordiv(a, P)
        key = (_shift(a, h, P), _shift(b, h, P))
        if key not in elab:
            elab[key] = len(edges)
            ends = []
            for p in key:
                v, off = vertex(p)
                ends.append((v, off))
            edges.append(tuple(ends))
        return elab[key], h

    def face(cycle):
        h = _home(cycle, P)
        key = frozenset(_shift(p, h, P) for p in cycle)
        if key not in flab:
            loc = [_shift(p, h, P) for p in cycle]
            row = []
            for a, b in zip(loc, loc[1:] + loc[:1]):
                e, eh = edge(a, b)
                row.append((e, eh))
            flab[key] = len(faces)
            faces.append(tuple(row))
        return flab[key], h

    for cell in cells:
        pts = [p for f in cell for p in f]
        h = _home(pts, P)
        key = frozenset(frozenset(_shift(p, h, P) for p in f) for f in cell)
        if key in clab:
            continue
        clab[key] = len(cell_rows)
        row = []
        for f in cell:
            fl, fh = face([_shift(p, h, P) for p in f])
            row.append((fl, fh))
        cell_rows.append(tuple(row))

    coords = [None] * len(vlab)
    for q, i in vlab.items():
        coords[i] = tuple(q[a] / P[a] for a in range(3))
    return UnitCellTemplate(
        name=name,
        vertices=tuple(range(len(vlab))),
        edges=tuple(edges),
        faces=tuple(faces),
        cells=tuple(cell_rows),
        coords=tuple(coords),
    )


# ------------------------------------------------------------------ entries


def _cubic():
    cube = [p for p in itertools.product((0, 1), repeat=3)]
    return template_from_polytopes("cubic", 1, [convex_hull_faces(cube)])


def _alternated_cubic():
    cells = []
    for o in itertools.product((0, 1), repeat=3):
        tet = [(o[0] + a, o[1] + b, o[2] + c) for a, b, c in itertools.product((0, 1), repeat=3)
               if (o[0] + a + o[1] + b + o[2] + c) % 2 == 0]
        cells.append(convex_hull_faces(tet))
    for c in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]:
        octa = []
        for ax in range(3):
            for s in (-1, 1):
                p = list(c)
                p[ax] += s
                octa.append(tuple(p))
        cells.append(convex_hull_faces(octa))
    return template_from_polytopes("alternated-cubic", 2, cells)


def _four_star():
    # Reference cubic lattice doubled: reference vertices at even points,
    # edge midpoints have one odd coordinate, face centres two.
    cells = []
    signs = list(itertools.product((-1, 1), repeat=3))

    def hexagon(v, s):
        e = [tuple(v[a] + (s[a] if a == i else 0) for a in range(3)) for i in range(3)]
        f = {}
        for i, j in ((0, 1), (1, 2), (2, 0)):
            f[i, j] = tuple(v[a] + (s[a] if a in (i, j) else 0) for a in range(3))
        return [e[0], f[0, 1], e[1], f[1, 2], e[2], f[2, 0]]

    v0 = (0, 0, 0)
    cells.append([hexagon(v0, s) for s in signs])
    c0 = (1, 1, 1)
    cells.append([hexagon(_sub(c0, s), s) for s in signs])
    return template_from_polytopes("4-star", 2, cells)


def _pyrochlore():
    # Conventional cube of side 8: diamond sites A = fcc, B = A + (2,2,2);
    # vertices are bond midpoints; truncated tetrahedra sit on the empty
    # diamond sites.
    fcc = [(0, 0, 0), (4, 4, 0), (4, 0, 4), (0, 4, 4)]
    up = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    down = [(-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1)]
    verts = set()
    cells = []
    for a in fcc:
        tet = [tuple(a[i] + d[i] for i in range(3)) for d in up]
        verts.update(tet)
        cells.append(convex_hull_faces(tet))
        b = tuple(x + 2 for x in a)
        tet = [tuple(b[i] + d[i] for i in range(3)) for d in down]
        verts.update(tet)
        cells.append(convex_hull_faces(tet))
    cloud = set()
    for v in verts:
        for t in itertools.product((-8, 0, 8), repeat=3):
            cloud.add(tuple(v[i] + t[i] for i in range(3)))
    for a in fcc:
        for base in ((4, 4, 4), (6, 6, 6)):
            t = tuple(a[i] + base[i] for i in range(3))
            near = sorted(cloud, key=lambda p: sum((p[i] - t[i]) ** 2 for i in range(3)))[:12]
            cells.append(convex_hull_faces(near))
    return template_from_polytopes("pyrochlore", 8, cells)


def _hexagonal_prism():
    # Triangular-lattice coordinates scaled by 3; not a fusion complex.
    hexa = [(1, 1), (-1, 2), (-2, 1), (-1, -1), (1, -2), (2, -1)]
    pts = [(x, y, z) for x, y in hexa for z in (0, 3)]
    return template_from_polytopes("hexagonal-prism", 3, [convex_hull_faces(pts)])


def _bcc_bipyramid():
    # Corners at even points, body centres at (1,1,1) + 2Z^3.  Each cube
    # face spans a square bipyramid between the two adjacent body centres.
    cells = []
    for ax in range(3):
        c1 = (1, 1, 1)
        c2 = tuple(3 if a == ax else 1 for a in range(3))
        eq = []
        others = [a for a in range(3) if a != ax]
        for u, w in itertools.product((0, 2), repeat=2):
            p = [0, 0, 0]
            p[ax] = 2
            p[others[0]] = u
            p[others[1]] = w
            eq.append(tuple(p))
        cells.append(convex_hull_faces([c1, c2] + eq))
    return template_from_polytopes("bcc-bipyramid", 2, cells)


_BUILDERS = {
    "cubic": _cubic,
    "alternated-cubic": _alternated_cubic,
    "4-star": _four_star,
    "pyrochlore": _pyrochlore,
    "hexagonal-prism": _hexagonal_prism,
    "bcc-bipyramid": _bcc_bipyramid,
}

# complexes from the fusion-complex table; the rest are test fixtures
FUSION_CATALOG = ("cubic", "alternated-cubic", "4-star", "pyrochlore")


def catalog_names() -> list[str]:
    return list(_BUILDERS)


@lru_cache(maxsize=None)
def catalog(name: str) -> UnitCellTemplate:
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise UnknownName(f"unknown catalog complex {name!r}; known: {', '.join(_BUILDERS)}") from None
    return build()
