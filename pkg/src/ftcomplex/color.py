"""Color-code fusion complexes: triangulated 2-skeleton, 3-colorable vertices.

The network puts one resource state on every 3-cell and one qubit on each
side of every face, so a face carries two qubits and one fusion.  The
resource state of a cell is a color code on its boundary sphere, with an X
and a Z generator per cell corner.  Every vertex gives an X and a Z check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .complex import CellColoring, CellComplex, ValidationReport
from .errors import InvalidColorComplex
from .stab import Basis, GeneratorSet, PauliWord, group_intersection

__all__ = [
    "ColorCheck",
    "ColorNetwork",
    "three_color_vertices",
    "validate_color_complex",
    "build_color_network",
    "verify_color_network",
]

MAX_VERTICES_PER_CELL = 64
SEARCH_BUDGET = 200_000


def _adjacency(K: CellComplex):
    adj: list[set[int]] = [set() for _ in range(K.n_vertices)]
    loops = []
    for e, (a, b) in enumerate(K.edge_vertices):
        a, b = int(a), int(b)
        if a == b:
            loops.append(e)
            continue
        adj[a].add(b)
        adj[b].add(a)
    return [sorted(s) for s in adj], loops


def three_color_vertices(K: CellComplex, budget: int = SEARCH_BUDGET):
    """Exact backtracking 3-coloring of the 1-skeleton.

    Returns ``(colors, decided)``: ``colors`` is a tuple over ``"RGB"`` or
    None.  Vertices are chosen by fewest remaining colors; a fresh color is
    only tried as the lowest unused one, which removes permutation symmetry.
    ``decided`` is False when the search ran out of ``budget`` nodes.
    """
    adj, loops = _adjacency(K)
    n = K.n_vertices
    if loops:
        return None, True
    color = [-1] * n
    steps = 0

    def options(v):
        used = {color[w] for w in adj[v] if color[w] >= 0}
        return [c for c in range(3) if c not in used]

    def pick():
        best, best_opts = -1, None
        for v in range(n):
            if color[v] < 0:
                o = options(v)
                if best_opts is None or len(o) < len(best_opts):
                    best, best_opts = v, o
                    if len(o) <= 1:
                        break
        return best, best_opts

    def solve(top):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise TimeoutError
        v, opts = pick()
        if v < 0:
            return True
        for c in opts:
            if c > top + 1:
                break
            color[v] = c
            if solve(max(top, c)):
                return True
        color[v] = -1
        return False

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, n + 1000))
    try:
        ok = solve(-1)
    except TimeoutError:
        return None, False
    finally:
        sys.setrecursionlimit(old)
    if not ok:
        return None, True
    return tuple("RGB"[c] for c in color), True


def _per_cell(K: CellComplex) -> float:
    if K.dims is None:
        return float(K.n_vertices)
    return K.n_vertices / max(1, int(np.prod(K.dims)))


def validate_color_complex(K: CellComplex, coloring: CellColoring | None = None) -> ValidationReport:
    """Triangular faces and a proper vertex 3-coloring.

    With ``coloring`` given it is checked instead of searched for.  Inputs
    with more than 64 vertices per unit cell are reported undecided.
    """
    bad = []
    for f, size in enumerate(K.face_sizes()):
        if size != 3:
            bad.append((f, "triangle", f"face {f} has {int(size)} edges"))
    info: dict = {}
    undecided = False
    if coloring is not None:
        if len(coloring) != K.n_vertices or len(set(coloring.assignment)) > 3:
            bad.append((-1, "coloring", "expected at most three colors, one per vertex"))
        else:
            for e, (a, b) in enumerate(K.edge_vertices):
                if coloring[int(a)] == coloring[int(b)]:
                    bad.append((e, "coloring", f"edge {e} joins two {coloring[int(a)]} vertices"))
        info["coloring"] = coloring
    elif _per_cell(K) > MAX_VERTICES_PER_CELL:
        undecided = True
    else:
        colors, decided = three_color_vertices(K)
        if not decided:
            undecided = True
        elif colors is None:
            bad.append((-1, "coloring", "vertices admit no proper 3-coloring"))
        else:
            info["coloring"] = CellColoring("vertices3", colors)
    valid = not bad and not undecided
    return ValidationReport(valid, bad, undecided=undecided and not bad, info=info)


@dataclass(frozen=True)
class ColorCheck:
    vertex: int
    type: str
    faces: tuple[int, ...]
    word: PauliWord

    @property
    def weight(self) -> int:
        """Number of fusions in the check."""
        return len(self.faces)


@dataclass(eq=False)
class ColorNetwork:
    complex: CellComplex
    coloring: CellColoring
    # per cell: list of (vertex, lift, qubits)
    corners: list[list[tuple[int, tuple, tuple[int, ...]]]] = field(repr=False)
    checks: list[ColorCheck] = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return 2 * self.complex.n_faces

    def qubits_of(self, c: int) -> list[int]:
        return sorted({q for _, _, qs in self.corners[c] for q in qs})

    def resource_state(self, c: int) -> GeneratorSet:
        n = self.n_qubits
        gens, labels = [], []
        for v, _, qs in self.corners[c]:
            for kind in "XZ":
                gens.append(PauliWord.on(n, qs, kind))
                labels.append(f"c{c}:{kind}{v}")
        return GeneratorSet(n, tuple(gens), tuple(labels))

    @cached_property
    def resource_group(self) -> GeneratorSet:
        gens, labels = [], []
        for c in range(self.complex.n_cells):
            r = self.resource_state(c)
            gens.extend(r.generators)
            labels.extend(r.labels)
        return GeneratorSet(self.n_qubits, tuple(gens), tuple(labels))

    @cached_property
    def fusion_group(self) -> GeneratorSet:
        n = self.n_qubits
        gens, labels = [], []
        for f in range(self.complex.n_faces):
            for kind in "XZ":
                gens.append(PauliWord.on(n, (2 * f, 2 * f + 1), kind))
                labels.append(f"{kind}{kind}{f}")
        return GeneratorSet(n, tuple(gens), tuple(labels))

    @cached_property
    def check_group(self) -> GeneratorSet:
        return GeneratorSet(
            self.n_qubits, tuple(c.word for c in self.checks), tuple(f"{c.type}{c.vertex}" for c in self.checks)
        )

    def summary(self) -> dict:
        K = self.complex
        return {
            "name": K.name,
            "resource_states": K.n_cells,
            "fusions": K.n_faces,
            "qubits": self.n_qubits,
            "resource_sizes": sorted({len(self.qubits_of(c)) for c in range(K.n_cells)}),
            "check_weights": sorted({c.weight for c in self.checks}),
        }


def _face_qubits(K: CellComplex) -> dict:
    """``(cell, face, wrap)`` -> qubit; the first side seen of face f is ``2f``."""
    used = np.zeros(K.n_faces, dtype=np.int64)
    out = {}
    for c in range(K.n_cells):
        for f, s in K.bd3.items(c):
            out[(c, f, s)] = 2 * f + int(used[f])
            used[f] += 1
    return out


def _cell_corners(K: CellComplex, qmap: dict):
    ev = K.edge_vertices
    sh = K.bd1.shift.reshape(-1, 2, 3)
    out = []
    for c in range(K.n_cells):
        corners: dict = {}
        for f, s in K.bd3.items(c):
            q = qmap[(c, f, s)]
            lifts = set()
            for e, t in K.bd2.items(f):
                for j in range(2):
                    d = sh[e, j]
                    lifts.add((int(ev[e, j]), (s[0] + t[0] + int(d[0]), s[1] + t[1] + int(d[1]), s[2] + t[2] + int(d[2]))))
            for key in lifts:
                corners.setdefault(key, []).append(q)
        out.append([(v, lift, tuple(sorted(qs))) for (v, lift), qs in sorted(corners.items())])
    return out


def build_color_network(K: CellComplex, vertex_3coloring: CellColoring | None = None) -> ColorNetwork:
    rep = validate_color_complex(K, vertex_3coloring)
    if not rep.valid:
        why = rep.violations[0][2] if rep.violations else "color complex check undecided"
        raise InvalidColorComplex(why)
    coloring = rep.info["coloring"]
    corners = _cell_corners(K, _face_qubits(K))
    n = 2 * K.n_faces
    at_vertex: list[list[tuple[int, ...]]] = [[] for _ in range(K.n_vertices)]
    for clist in corners:
        for v, _, qs in clist:
            at_vertex[v].append(qs)
    checks = []
    for v in range(K.n_vertices):
        for kind in "XZ":
            w = PauliWord(n, 0)
            for qs in at_vertex[v]:
                w = w * PauliWord.on(n, qs, kind)
            faces = tuple(sorted({q // 2 for q in w.support()}))
            checks.append(ColorCheck(v, kind, faces, w))
    return ColorNetwork(K, coloring, corners, checks)


def verify_color_network(net: ColorNetwork) -> ValidationReport:
    """Per-cell commutation and span(checks) inside R ∩ F; ranks go to ``info``."""
    bad = []
    for c in range(net.complex.n_cells):
        gens = net.resource_state(c).generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if not gens[i].commutes(gens[j]):
                    bad.append((c, "commute", f"resource state on cell {c}: generators {i} and {j} anticommute"))
    R, F, C = net.resource_group, net.fusion_group, net.check_group
    inter = group_intersection(R, F)
    bi = Basis(g.bits for g in inter.generators)
    for chk in net.checks:
        if chk.word.bits not in bi:
            bad.append((chk.vertex, "check", f"{chk.type} check on vertex {chk.vertex} is not in R ∩ F"))
    info = {
        "rank_checks": C.rank,
        "rank_intersection": len(bi),
        "resource_ranks": sorted({net.resource_state(c).rank for c in range(net.complex.n_cells)}),
    }
    return ValidationReport(not bad, bad, info=info)
