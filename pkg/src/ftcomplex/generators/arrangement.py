"""Cell complexes cut out by periodic plane (or line) arrangements.

A :class:`PlaneFamily` with primitive normal ``n`` and offsets ``o`` gives
the planes ``n.x = (o + k) D`` on the torus ``R^3 / diag(L)``, where ``D`` is
the gcd of ``n_i L_i``: the smallest step by which ``n.x`` changes under a
torus translation.  All geometry is done in exact rationals so that the
genericity tests (four planes through a point, a line on three planes) are
decided exactly.

Vertices are triple intersections, edges are the segments between them
along pairwise intersection lines, faces are the polygons into which each
plane is cut, and cells are the chambers.  Wraps are tracked on lifts in
the universal cover, in units of the torus periods.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..complex import CellComplex, Incidence
from ..errors import InvalidComplex, NonGeneric, Unbounded

__all__ = ["PlaneFamily", "plane_arrangement", "line_arrangement"]


@dataclass(frozen=True)
class PlaneFamily:
    normal: tuple[int, ...]
    offsets: tuple = (Fraction(0),)

    def __post_init__(self):
        n = tuple(int(x) for x in self.normal)
        if not any(n):
            raise ValueError("normal must be nonzero")
        if math.gcd(*n) != 1:
            raise ValueError(f"normal {n} is not primitive")
        offs = tuple(Fraction(o) for o in self.offsets)
        for o in offs:
            if not 0 <= o < 1:
                raise ValueError(f"offset {o} not in [0, 1)")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def uniform(cls, normal, count: int, shift=0) -> "PlaneFamily":
        """``count`` equally spaced planes, the first at ``shift / count``."""
        s = Fraction(shift)
        return cls(tuple(normal), tuple((Fraction(k) + s) / count for k in range(count)))


# ------------------------------------------------------------ vector helpers


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _primitive(v):
    g = math.gcd(*v)
    v = tuple(x // g for x in v)
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _solve(rows, rhs):
    """Exact solution of a small nonsingular system."""
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return tuple(m[i][n] / m[i][i] for i in range(n))


def _det(rows):
    if len(rows) == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    return _dot(rows[0], _cross(rows[1], rows[2]))


class _Planes:
    """Flat list of hyperplanes ``n.x = c (mod D)`` with genericity checks."""

    def __init__(self, families, periods):
        self.L = tuple(int(x) for x in periods)
        self.dim = len(self.L)
        self.normal, self.c, self.D, self.label = [], [], [], []
        seen = {}
        for fi, fam in enumerate(families):
            n = fam.normal
            if len(n) != self.dim:
                raise ValueError(f"family {fi} normal has wrong length")
            D = math.gcd(*(abs(a) * l for a, l in zip(n, self.L)))
            sign = 1 if _primitive(n) == n else -1
            for oi, o in enumerate(fam.offsets):
                c = o * D
                key = (_primitive(n), (sign * c) % D)
                if key in seen:
                    raise NonGeneric("coincident planes", (seen[key], (fi, oi)))
                seen[key] = (fi, oi)
                self.normal.append(n)
                self.c.append(c)
                self.D.append(D)
                self.label.append((fi, oi))
        normals = {_primitive(f.normal) for f in families}
        rank = np.linalg.matrix_rank(np.array(sorted(normals), dtype=float)) if normals else 0
        if rank < self.dim:
            raise Unbounded(f"normals span only {rank} of {self.dim} directions")

    def __len__(self):
        return len(self.normal)

    def contains(self, i, x) -> bool:
        return (_dot(self.normal[i], x) - self.c[i]) % self.D[i] == 0

    def reduce(self, x):
        wrap = tuple(math.floor(a / l) for a, l in zip(x, self.L))
        return tuple(a - w * l for a, w, l in zip(x, wrap, self.L)), wrap

    def solve_all(self, idx):
        """All torus points on the planes ``idx`` (independent normals)."""
        rows = [self.normal[i] for i in idx]
        x0 = _solve(rows, [self.c[i] for i in idx])
        gens = []
        for k, i in enumerate(idx):
            rhs = [0] * len(idx)
            rhs[k] = self.D[i]
            gens.append(_solve(rows, rhs))
        pts = {self.reduce(x0)[0]}
        todo = list(pts)
        while todo:
            p = todo.pop()
            for g in gens:
                q = self.reduce(tuple(a + b for a, b in zip(p, g)))[0]
                if q not in pts:
                    pts.add(q)
                    todo.append(q)
        return pts

    def next_hit(self, x, d, skip):
        """Smallest t > 0 at which ``x + t d`` meets a plane not in ``skip``."""
        best, who = None, []
        for i in range(len(self)):
            if i in skip:
                continue
            s = _dot(self.normal[i], d)
            if s == 0:
                continue
            r = (self.c[i] - _dot(self.normal[i], x)) % self.D[i] if s > 0 else \
                (_dot(self.normal[i], x) - self.c[i]) % self.D[i]
            t = (r if r else self.D[i]) / abs(s)
            if best is None or t < best:
                best, who = t, [i]
            elif t == best:
                who.append(i)
        return best, who


def _vertices(P: _Planes):
    dim = P.dim
    verts = {}
    for idx in itertools.combinations(range(len(P)), dim):
        if _det([P.normal[i] for i in idx]) == 0:
            continue
        for x in P.solve_all(idx):
            if x in verts:
                continue
            on = tuple(i for i in range(len(P)) if P.contains(i, x))
            if len(on) > dim:
                raise NonGeneric(
                    f"{len(on)} hyperplanes meet at {tuple(map(str, x))}",
                    tuple(P.label[i] for i in on),
                )
            verts[x] = on
    pts = sorted(verts)
    return pts, [verts[p] for p in pts]


def _direction(P, planes):
    if P.dim == 2:
        n = P.normal[planes[0]]
        return _primitive((-n[1], n[0]))
    return _primitive(_cross(P.normal[planes[0]], P.normal[planes[1]]))


def _edges(P: _Planes, pts, on):
    vid = {p: i for i, p in enumerate(pts)}
    edges = []  # (v0, v1, wrap, line planes, direction, start point, end lift)
    start, end = {}, {}
    for v, (x, planes) in enumerate(zip(pts, on)):
        for line in itertools.combinations(planes, P.dim - 1):
            d = _direction(P, line)
            t, who = P.next_hit(x, d, set(line))
            y = tuple(a + t * b for a, b in zip(x, d))
            y0, wrap = P.reduce(y)
            if y0 not in vid:
                raise NonGeneric("line crosses a hyperplane away from a vertex",
                                 tuple(P.label[i] for i in line + tuple(who)))
            e = len(edges)
            edges.append((v, vid[y0], wrap, line, d, x, y))
            start[v, line] = e
            end[vid[y0], line] = e
    return edges, start, end


def _faces(P: _Planes, pts, on, edges, start, end):
    """Polygon walks; a state is (edge, host plane, side of the edge's other plane)."""
    dim = P.dim
    face_of = {}
    shift_at = {}
    rows = []
    for e0, ed in enumerate(edges):
        hosts = ed[3] if dim == 3 else (None,)
        for host in hosts:
            for sigma in (1, -1):
                if (e0, host, sigma) in face_of:
                    continue
                f = len(rows)
                row = []
                e, side, delta = e0, sigma, 1
                origin = ed[5]
                cur = origin
                for _ in range(10 * len(edges) + 10):
                    v0, v1, wrap, line, d, x, y = edges[e]
                    face_of[e, host, side] = f
                    if delta == 1:
                        s = tuple((a - b) / l for a, b, l in zip(cur, x, P.L))
                        nxt = tuple(b + si * l for b, si, l in zip(y, s, P.L))
                        w = v1
                    else:
                        s = tuple((a - b) / l for a, b, l in zip(cur, y, P.L))
                        nxt = tuple(b + si * l for b, si, l in zip(x, s, P.L))
                        w = v0
                    row.append((e, tuple(int(a) for a in s)))
                    shift_at[e, host, side] = row[-1][1]
                    t_in = tuple(delta * a for a in d)
                    other = [i for i in line if i != host][0]
                    third = [i for i in on[w] if i not in line][0]
                    new_line = tuple(sorted(i for i in on[w] if i != other))
                    d2 = _direction(P, new_line)
                    tau = _sign(side * _dot(P.normal[other], d2))
                    side = _sign(-_dot(P.normal[third], t_in))
                    if tau == 0 or side == 0:
                        raise NonGeneric("degenerate corner", tuple(P.label[i] for i in on[w]))
                    e = start[w, new_line] if tau == 1 else end[w, new_line]
                    delta = tau
                    cur = nxt
                    if e == e0 and side == sigma and delta == 1:
                        break
                else:
                    raise InvalidComplex("face walk did not close")
                if cur != origin:
                    raise InvalidComplex("face walk closed on a different lift")
                rows.append(row)
    return rows, face_of, shift_at


def _chambers(P: _Planes, edges, face_rows, face_of, shift_at):
    """Union (face, side) pairs around every edge; sides refer to the host normal."""
    dim = P.dim
    n = 2 * len(face_rows)
    adj = [[] for _ in range(n)]

    def node(f, a):
        return 2 * f + (a < 0)

    def link(e, p, b, q, a):
        # a face may hold the same edge twice, so shifts are keyed by walk state
        f1, f2 = face_of[e, p, b], face_of[e, q, a]
        s1, s2 = shift_at[e, p, b], shift_at[e, q, a]
        a1, a2 = a, b
        rel = tuple(x - y for x, y in zip(s1, s2))
        adj[node(f1, a1)].append((node(f2, a2), rel))
        adj[node(f2, a2)].append((node(f1, a1), tuple(-x for x in rel)))

    for e, ed in enumerate(edges):
        line = ed[3]
        if dim == 3:
            p, q = line
            for a, b in itertools.product((1, -1), repeat=2):
                link(e, p, b, q, a)
        else:
            # in 2d the chambers are the faces themselves
            pass
    if dim == 2:
        return None
    cells = []
    seen = [None] * n
    for r in range(n):
        if seen[r] is not None:
            continue
        seen[r] = (0, 0, 0)
        members, todo = [r], [r]
        while todo:
            u = todo.pop()
            for w, rel in adj[u]:
                s = tuple(a + b for a, b in zip(seen[u], rel))
                if seen[w] is None:
                    seen[w] = s
                    members.append(w)
                    todo.append(w)
                elif seen[w] != s:
                    raise Unbounded("a chamber wraps around the torus")
        cells.append([(m // 2, seen[m]) for m in sorted(members)])
    return cells


def _arrangement(families, periods, name):
    P = _Planes(families, periods)
    pts, on = _vertices(P)
    if not pts:
        raise Unbounded("arrangement has no vertices")
    edges, start, end = _edges(P, pts, on)
    face_rows, face_of, shift_at = _faces(P, pts, on, edges, start, end)
    cells = _chambers(P, edges, face_rows, face_of, shift_at)
    pad = (0,) * (3 - P.dim)
    bd1 = Incidence.from_rows([[(v0, (0, 0, 0)), (v1, tuple(w) + pad)] for v0, v1, w, *_ in edges])
    bd2 = Incidence.from_rows([[(e, tuple(s) + pad) for e, s in row] for row in face_rows])
    bd3 = Incidence.from_rows(cells) if cells is not None else None
    coords = np.array([[float(a) for a in p] + [0.0] * len(pad) for p in pts])
    return CellComplex(
        name=name,
        n_vertices=len(pts),
        bd1=bd1,
        bd2=bd2,
        bd3=bd3,
        dims=tuple(P.L) + (1,) * len(pad),
        coords=coords,
    )


def plane_arrangement(families: Sequence[PlaneFamily], periods, name: str = "arrangement") -> CellComplex:
    """Cell complex of a generic periodic plane arrangement on a 3-torus."""
    if len(periods) != 3:
        raise ValueError("periods must have three entries")
    return _arrangement(families, periods, name)


def line_arrangement(families: Sequence[PlaneFamily], periods, name: str = "line-arrangement") -> CellComplex:
    """Two-dimensional analogue: lines on a 2-torus cut it into polygons.

    The result is a 2d :class:`CellComplex` whose wraps have a zero third
    component.
    """
    if len(periods) != 2:
        raise ValueError("periods must have two entries")
    return _arrangement(families, periods, name)
