"""Independent reference implementations used only by the tests.

Nothing here imports the package's linear algebra or decoders, so
agreement with them is meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np


def gf2_rank(rows) -> int:
    """Rank over GF(2) of a 0/1 matrix by dense numpy elimination."""
    M = np.array(rows, dtype=np.uint8) & 1
    if M.size == 0:
        return 0
    M = M.reshape(len(M), -1).copy()
    r = 0
    for c in range(M.shape[1]):
        piv = np.flatnonzero(M[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        hits = np.flatnonzero(M[:, c])
        hits = hits[hits != r]
        M[hits] ^= M[r]
        r += 1
        if r == M.shape[0]:
            break
    return r


def word_rows(words):
    """Symplectic 0/1 rows ``[x | z]`` of PauliWords."""
    out = []
    for w in words:
        x = [(w.x_bits >> i) & 1 for i in range(w.n)]
        z = [(w.z_bits >> i) & 1 for i in range(w.n)]
        out.append(x + z)
    return out


def in_span(rows, v) -> bool:
    return gf2_rank(list(rows) + [v]) == gf2_rank(rows)


def symplectic(a, b) -> int:
    n = len(a) // 2
    a = np.asarray(a)
    b = np.asarray(b)
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) & 1)


def all_products(rows, width=None):
    """Every element of the group generated by ``rows`` (small inputs)."""
    rows = [tuple(int(x) for x in r) for r in rows]
    if width is None:
        width = len(rows[0])
    seen = {tuple([0] * width)}
    for r in rows:
        seen |= {tuple(a ^ b for a, b in zip(s, r)) for s in seen}
    return seen


def coset_classes(ends, mem, erased, flipped) -> set[int]:
    """Logical classes of all erasure-supported corrections of a syndrome.

    Enumerates every subset of erased edges; a subset is a valid correction
    when its syndrome matches that of ``flipped``.  The class of a
    correction is the membrane parity of ``correction XOR flipped``.
    """
    ends = np.asarray(ends)
    n = int(ends.max()) + 1 if len(ends) else 0
    def synd_bits(e):
        a, b = (int(x) for x in ends[e])
        return (1 << a) ^ (1 << b)
    target = 0
    base_mem = 0
    for e in np.flatnonzero(flipped):
        target ^= synd_bits(e)
        base_mem ^= int(mem[e])
    er = [int(e) for e in np.flatnonzero(erased)]
    synd = np.zeros(1, dtype=np.int64 if n < 63 else object)
    cls = np.zeros(1, dtype=np.int64)
    for e in er:
        s, m = synd_bits(e), int(mem[e])
        synd = np.concatenate([synd, synd ^ s])
        cls = np.concatenate([cls, cls ^ m])
    ok = synd == target
    return {int(c) ^ base_mem for c in cls[ok]}


def toric_graph(L: int):
    """Syndrome graph of the 2d toric code: an L×L periodic grid.

    Returns ``(ends, mem)``; membrane bit 0 marks horizontal edges crossing
    the seam x = L-1 -> 0, bit 1 vertical edges crossing y = L-1 -> 0.
    """
    ends, mem = [], []
    vid = lambda x, y: (x % L) * L + (y % L)
    for x, y in itertools.product(range(L), repeat=2):
        ends.append((vid(x, y), vid(x + 1, y)))
        mem.append(1 if x == L - 1 else 0)
        ends.append((vid(x, y), vid(x, y + 1)))
        mem.append(2 if y == L - 1 else 0)
    return np.array(ends, dtype=np.int64), np.array(mem, dtype=np.uint8)


def random_instance(rng, max_edges=40, max_erased=16):
    """A small decoding instance: graph, membrane bits, erasure and flips.

    Draws from 2d toric grids, the cubic 2x2x2 syndrome graphs (passed in by
    the caller through ``extra``) or random multigraphs with random labels.
    """
    kind = rng.integers(3)
    if kind == 0:
        ends, mem = toric_graph(int(rng.integers(2, 5)))
    else:
        n = int(rng.integers(2, 12))
        E = int(rng.integers(1, max_edges + 1))
        ends = rng.integers(0, n, size=(E, 2)).astype(np.int64)
        ends[: min(n - 1, E), 0] = np.arange(min(n - 1, E))
        ends[: min(n - 1, E), 1] = np.arange(1, min(n, E + 1))
        mem = rng.integers(0, 8 if kind == 1 else 2, size=E).astype(np.uint8)
    E = len(ends)
    erased = rng.random(E) < rng.uniform(0.1, 0.7)
    idx = np.flatnonzero(erased)
    if idx.size > max_erased:
        erased[:] = False
        erased[rng.choice(idx, max_erased, replace=False)] = True
    flipped = erased & (rng.random(E) < 0.5)
    return ends, mem, erased, flipped
