"""Binary-symplectic Pauli algebra over GF(2).

A Pauli word on ``n`` qubits is stored as one Python integer holding the
X bits in positions ``0..n-1`` and the Z bits in ``n..2n-1``.  Signs are
dropped everywhere.  Python integers give word-parallel XOR for free, which
is all Gaussian elimination needs here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch

__all__ = [
    "PauliWord",
    "GeneratorSet",
    "commutes",
    "span_reduce",
    "group_intersection",
    "centralizer_intersection",
    "Basis",
]


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliWord:
    n: int
    bits: int = 0

    @classmethod
    def from_xz(cls, x, z) -> "PauliWord":
        x = np.asarray(x, dtype=bool)
        z = np.asarray(z, dtype=bool)
        if x.shape != z.shape:
            raise LengthMismatch("x and z parts differ in length")
        n = x.size
        xb = sum(1 << int(i) for i in np.flatnonzero(x))
        zb = sum(1 << int(i) for i in np.flatnonzero(z))
        return cls(n, xb | (zb << n))

    @classmethod
    def from_string(cls, text: str) -> "PauliWord":
        """Parse ``"XIZY"``-style text; qubit 0 is the leftmost character."""
        text = text.strip()
        n = len(text)
        x = z = 0
        for i, ch in enumerate(text.upper()):
            if ch in "XY":
                x |= 1 << i
            if ch in "ZY":
                z |= 1 << i
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli letter {ch!r} at {i}")
        return cls(n, x | (z << n))

    @classmethod
    def on(cls, n: int, qubits: Iterable[int], kind: str) -> "PauliWord":
        """Product of ``kind`` ('X' or 'Z') over ``qubits`` (repeats cancel)."""
        b = 0
        for q in qubits:
            b ^= 1 << int(q)
        if kind == "Z":
            b <<= n
        elif kind != "X":
            raise ValueError(kind)
        return cls(n, b)

    @property
    def x_bits(self) -> int:
        return self.bits & ((1 << self.n) - 1)

    @property
    def z_bits(self) -> int:
        return self.bits >> self.n

    @property
    def x_part(self) -> np.ndarray:
        return _bits_to_array(self.x_bits, self.n)

    @property
    def z_part(self) -> np.ndarray:
        return _bits_to_array(self.z_bits, self.n)

    def support(self) -> list[int]:
        s = self.x_bits | self.z_bits
        return [i for i in range(self.n) if (s >> i) & 1]

    def weight(self) -> int:
        return _popcount(self.x_bits | self.z_bits)

    def is_identity(self) -> bool:
        return self.bits == 0

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        _same_n(self, other)
        return PauliWord(self.n, self.bits ^ other.bits)

    def commutes(self, other: "PauliWord") -> bool:
        return commutes(self, other)

    def restrict(self, qubits: Iterable[int]) -> "PauliWord":
        m = 0
        for q in qubits:
            m |= 1 << int(q)
        return PauliWord(self.n, self.bits & (m | (m << self.n)))

    def to_string(self) -> str:
        x, z = self.x_bits, self.z_bits
        return "".join("IXZY"[((x >> i) & 1) | (((z >> i) & 1) << 1)] for i in range(self.n))

    def __str__(self) -> str:
        return self.to_string()


def _bits_to_array(b: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=bool)
    i = 0
    while b:
        if b & 1:
            out[i] = True
        b >>= 1
        i += 1
    return out


def _same_n(a: PauliWord, b: PauliWord) -> None:
    if a.n != b.n:
        raise LengthMismatch(f"{a.n} vs {b.n} qubits")


def _omega(a: int, b: int, n: int) -> int:
    mask = (1 << n) - 1
    return _popcount(((a & mask) & (b >> n)) ^ ((a >> n) & (b & mask))) & 1


def commutes(a: PauliWord, b: PauliWord) -> bool:
    _same_n(a, b)
    return _omega(a.bits, b.bits, a.n) == 0


class Basis:
    """Incremental GF(2) row basis keyed by lowest set bit.

    Pivots are the lowest bit of each stored row, so with X bits first the
    lowest qubit index is eliminated first.
    """

    def __init__(self, rows: Iterable[int] = ()):
        self.rows: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def reduce(self, v: int) -> int:
        rows = self.rows
        while v:
            low = v & -v
            p = low.bit_length() - 1
            r = rows.get(p)
            if r is None:
                return v
            v ^= r
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self.rows[(v & -v).bit_length() - 1] = v
            return True
        return False

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __len__(self) -> int:
        return len(self.rows)

    def reduced_rows(self) -> list[int]:
        """Fully reduced rows sorted by pivot (a canonical form of the span)."""
        pivots = sorted(self.rows)
        rows = {p: self.rows[p] for p in pivots}
        for p in reversed(pivots):
            r = rows[p]
            for q in pivots:
                if q != p and (rows[q] >> p) & 1:
                    rows[q] ^= r
        return [rows[p] for p in pivots]


@dataclass(frozen=True)
class GeneratorSet:
    n: int
    generators: tuple[PauliWord, ...] = ()
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for g in self.generators:
            if g.n != self.n:
                raise LengthMismatch(f"generator on {g.n} qubits in {self.n}-qubit set")

    @classmethod
    def from_strings(cls, words: Sequence[str], labels: Sequence = ()) -> "GeneratorSet":
        gens = tuple(PauliWord.from_string(w) for w in words)
        n = gens[0].n if gens else 0
        return cls(n, gens, tuple(labels))

    @classmethod
    def from_bits(cls, n: int, rows: Iterable[int], labels: Sequence = ()) -> "GeneratorSet":
        return cls(n, tuple(PauliWord(n, r) for r in rows), tuple(labels))

    def __len__(self) -> int:
        return len(self.generators)

    def basis(self) -> Basis:
        return Basis(g.bits for g in self.generators)

    @property
    def rank(self) -> int:
        return len(self.basis())

    def contains(self, w: PauliWord) -> bool:
        if w.n != self.n:
            raise LengthMismatch(f"{w.n} vs {self.n} qubits")
        return w.bits in self.basis()

    def issubgroup(self, other: "GeneratorSet") -> bool:
        b = other.basis()
        return all(g.bits in b for g in self.generators)

    def same_group(self, other: "GeneratorSet") -> bool:
        if self.n != other.n:
            return False
        return self.basis().reduced_rows() == other.basis().reduced_rows()

    def to_text(self) -> str:
        lines = []
        for i, g in enumerate(self.generators):
            lab = self.labels[i] if i < len(self.labels) else ""
            lines.append(f"{g.to_string()}\t{lab}".rstrip())
        return "\n".join(lines) + ("\n" if lines else "")


def span_reduce(g: GeneratorSet) -> GeneratorSet:
    """Independent generators of the same group in reduced echelon form."""
    rows = g.basis().reduced_rows()
    return GeneratorSet.from_bits(g.n, rows, labels=tuple(f"r{i}" for i in range(len(rows))))


def group_intersection(a: GeneratorSet, b: GeneratorSet) -> GeneratorSet:
    """Generators of span(a) ∩ span(b) by the Zassenhaus construction."""
    if a.n != b.n:
        raise LengthMismatch(f"{a.n} vs {b.n} qubits")
    width = 2 * a.n
    basis = Basis()
    for g in a.generators:
        basis.add(g.bits | (g.bits << width))
    for g in b.generators:
        basis.add(g.bits)
    inter = Basis(r >> width for p, r in basis.rows.items() if p >= width)
    rows = inter.reduced_rows()
    return GeneratorSet.from_bits(a.n, rows)


def centralizer_intersection(g: GeneratorSet) -> GeneratorSet:
    """Generators of Z(G) ∩ G: elements of G commuting with all of G."""
    gens = span_reduce(g).generators
    k = len(gens)
    n = g.n
    basis = Basis()
    for i, gi in enumerate(gens):
        row = 0
        for j, gj in enumerate(gens):
            if _omega(gi.bits, gj.bits, n):
                row |= 1 << j
        basis.add(row | (1 << (k + i)))
    out = Basis()
    for p, r in basis.rows.items():
        if p < k:
            continue
        lam = r >> k
        w = 0
        j = 0
        while lam:
            if lam & 1:
                w ^= gens[j].bits
            lam >>= 1
            j += 1
        out.add(w)
    return GeneratorSet.from_bits(n, out.reduced_rows())
