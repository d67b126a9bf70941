"""3d subsystem toric codes from fusion complexes with bi-colorable vertices.

Qubits sit on edges (qubit ``e`` is edge ``e``).  Each cell corner gives a
gauge generator on the cell's edges at that corner, of the cell's Pauli
type; each cell gives a stabilizer on all of its edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complex import CellColoring, CellComplex, ValidationReport, bicolor_cells, bicolor_vertices, validate_fusion_complex
from .errors import InvalidComplex, NotBicolorable, VerticesNotBicolorable
from .stab import Basis, GeneratorSet, PauliWord, centralizer_intersection

__all__ = [
    "SubsystemCode",
    "build_subsystem_code",
    "verify_subsystem_code",
    "faces_even",
    "validate_subsystem_complex",
    "gauge_corners",
]

VERIFY_MAX_QUBITS = 200


@dataclass(eq=False)
class SubsystemCode:
    complex: CellComplex
    vertex_coloring: CellColoring
    cell_coloring: CellColoring
    gauge: GeneratorSet
    stabilizers: GeneratorSet
    # per gauge generator: (vertex id, lift, cell id)
    corners: list[tuple[int, tuple[int, int, int], int]] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.complex.n_edges

    def gauge_weights(self) -> list[int]:
        return sorted({g.weight() for g in self.gauge.generators})

    def stabilizer_weights(self) -> list[int]:
        return sorted({g.weight() for g in self.stabilizers.generators})

    def summary(self) -> dict:
        return {
            "name": self.complex.name,
            "qubits": self.n_qubits,
            "gauge_generators": len(self.gauge),
            "stabilizers": len(self.stabilizers),
            "gauge_weights": self.gauge_weights(),
            "stabilizer_weights": self.stabilizer_weights(),
        }

    def to_text(self) -> str:
        """Generator lists with provenance, one Pauli string per line."""
        return "# gauge\tvertex\tcell\n" + self.gauge.to_text() + "# stabilizers\tcell\n" + self.stabilizers.to_text()


def faces_even(K: CellComplex) -> bool:
    """True if every face has an even number of edges."""
    return bool((K.face_sizes() % 2 == 0).all())


def validate_subsystem_complex(K: CellComplex) -> ValidationReport:
    """Fusion complex whose vertices admit a proper 2-coloring.

    ``info`` also records whether all faces are even, the local criterion
    that agrees with bi-colorability on tori of even size.
    """
    rep = validate_fusion_complex(K)
    bad = list(rep.violations)
    for f, size in enumerate(K.face_sizes()):
        if size % 2:
            bad.append((f, "odd-face", f"face {f} has {int(size)} edges"))
    try:
        bicolor_vertices(K)
        bicolorable = True
    except NotBicolorable as exc:
        bicolorable = False
        bad.append((-1, "vertex-coloring", str(exc)))
    return ValidationReport.from_violations(bad, faces_even=faces_even(K), vertices_bicolorable=bicolorable)


def gauge_corners(K: CellComplex) -> list[dict]:
    """Per cell: corner ``(vertex, lift)`` -> edges of the cell at that corner."""
    ev = K.edge_vertices
    sh = K.bd1.shift.reshape(-1, 2, 3)
    out = []
    for c in range(K.n_cells):
        corners: dict = {}
        for e, t in K.cell_edges[c]:
            for j in range(2):
                s = sh[e, j]
                key = (int(ev[e, j]), (t[0] + int(s[0]), t[1] + int(s[1]), t[2] + int(s[2])))
                corners.setdefault(key, []).append(int(e))
        out.append(corners)
    return out


def _parity_word(n: int, edges, kind: str) -> PauliWord:
    par: dict[int, int] = {}
    for e in edges:
        par[e] = par.get(e, 0) ^ 1
    return PauliWord.on(n, [e for e, p in par.items() if p], kind)


def build_subsystem_code(
    K: CellComplex, vertex_coloring: CellColoring | None = None, cell_coloring: CellColoring | None = None
) -> SubsystemCode:
    rep = validate_fusion_complex(K)
    if not rep.valid:
        raise InvalidComplex(rep.violations[0][2])
    if vertex_coloring is None:
        try:
            vertex_coloring = bicolor_vertices(K)
        except NotBicolorable as exc:
            raise VerticesNotBicolorable(str(exc)) from None
    else:
        for a, b in K.edge_vertices:
            if vertex_coloring[int(a)] == vertex_coloring[int(b)]:
                raise VerticesNotBicolorable(f"edge {int(a)}-{int(b)} joins two {vertex_coloring[int(a)]} vertices")
    if cell_coloring is None:
        cell_coloring = bicolor_cells(K)
    n = K.n_edges
    gens, labels, corners = [], [], []
    for c, cmap in enumerate(gauge_corners(K)):
        kind = cell_coloring[c]
        for (v, lift), edges in sorted(cmap.items()):
            gens.append(_parity_word(n, edges, kind))
            labels.append(f"{v}\t{c}")
            corners.append((v, lift, c))
    stabs = []
    for c, edges in enumerate(K.cell_edges):
        stabs.append(_parity_word(n, [e for e, _ in edges], cell_coloring[c]))
    return SubsystemCode(
        K,
        vertex_coloring,
        cell_coloring,
        GeneratorSet(n, tuple(gens), tuple(labels)),
        GeneratorSet(n, tuple(stabs), tuple(str(c) for c in range(K.n_cells))),
        corners,
    )


def verify_subsystem_code(code: SubsystemCode) -> ValidationReport:
    """Commutation, the two-ways product identity, and (when small) S = Z(G) ∩ G.

    Violation ids are gauge indices for commutation failures and cell ids
    for product failures.  ``info["logicals"]`` is the rank gap between
    Z(G) ∩ G and the stabilizers.
    """
    G, S = code.gauge, code.stabilizers
    bad = []
    for i, g in enumerate(G.generators):
        v, _, c = code.corners[i]
        for j, s in enumerate(S.generators):
            if not g.commutes(s):
                bad.append((i, "commute", f"gauge at corner (vertex {v}, cell {c}) anticommutes with stabilizer {j}"))
                break
    by_cell: dict[int, list[int]] = {}
    for i, (v, _, c) in enumerate(code.corners):
        by_cell.setdefault(c, []).append(i)
    colors = sorted(set(code.vertex_coloring.assignment))
    for c, s in enumerate(S.generators):
        for col in colors:
            acc = PauliWord(G.n, 0)
            for i in by_cell.get(c, []):
                if code.vertex_coloring[code.corners[i][0]] == col:
                    acc = acc * G.generators[i]
            if acc.bits != s.bits:
                bad.append((c, "product", f"gauge product over {col} corners of cell {c} differs from its stabilizer"))
    info = {"qubits": G.n, "rank_G": G.rank, "rank_S": S.rank}
    if G.n <= VERIFY_MAX_QUBITS:
        center = centralizer_intersection(G)
        bc = Basis(g.bits for g in center.generators)
        if not all(s.bits in bc for s in S.generators):
            bad.append((-1, "center", "some stabilizer is outside Z(G) ∩ G"))
        info["rank_center"] = len(bc)
        info["logicals"] = len(bc) - S.rank
    return ValidationReport(not bad, bad, info=info)
