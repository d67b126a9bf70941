"""Sampling and decoding kernels over a syndrome graph in CSR form.

Graph arguments are plain arrays so the same code compiles under numba:
``ends`` is ``(E, 2)``, ``indptr/nbr/eid`` the adjacency, and ``mem`` packs
the three membrane bits of every edge.  Masks are ``uint8`` arrays.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_INV53 = 1.0 / 9007199254740992.0

KIND_ERASE = 0
KIND_FLIP = 1
KIND_HALF = 2

DEC_PEEL = 0
DEC_UF = 1


@njit
def mix64(x):
    x = np.uint64(x)
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@njit
def trial_key(base, trial):
    return mix64(np.uint64(base) ^ (np.uint64(trial) * _GOLD))


@njit
def uniform(key, edge, kind):
    """Counter-based uniform in [0, 1) for one (trial, edge, purpose)."""
    x = mix64(np.uint64(key) + np.uint64(edge * 3 + kind + 1) * _GOLD)
    return float(x >> np.uint64(11)) * _INV53


@njit
def sample_edges(key, n_edges, p_erase, p_flip, erased, flipped):
    for e in range(n_edges):
        er = p_erase > 0.0 and uniform(key, e, KIND_ERASE) < p_erase
        fl = p_flip > 0.0 and uniform(key, e, KIND_FLIP) < p_flip
        if er:
            erased[e] = 1
            fl = uniform(key, e, KIND_HALF) < 0.5
        else:
            erased[e] = 0
        flipped[e] = 1 if fl else 0


@njit
def syndrome_of(ends, n_checks, flipped, lit):
    for v in range(n_checks):
        lit[v] = 0
    for e in range(ends.shape[0]):
        if flipped[e]:
            lit[ends[e, 0]] ^= 1
            lit[ends[e, 1]] ^= 1


@njit
def membrane_parity(mem, a, b):
    """Packed membrane parities of the edge set ``a XOR b``."""
    acc = 0
    for e in range(mem.shape[0]):
        if a[e] ^ b[e]:
            acc ^= mem[e]
    return acc


@njit
def _forest_peel(indptr, nbr, eid, usable, lit, correction, work, seen, mem):
    """Spanning forest of ``usable`` edges, then leaf peeling of ``lit``.

    ``work`` holds four int arrays of length n (BFS order, parent edge,
    parent vertex, membrane potential).  Returns ``(ok, ambiguous)``: ``ok``
    is False if some component keeps odd parity; ``ambiguous`` is True if a
    non-tree usable edge closes a cycle of nonzero membrane parity.
    """
    n = indptr.shape[0] - 1
    order = work[0:n]
    pedge = work[n:2 * n]
    pvert = work[2 * n:3 * n]
    pot = work[3 * n:4 * n]
    for v in range(n):
        seen[v] = 0
    ambiguous = False
    ok = True
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = 1
        pedge[s] = -1
        pvert[s] = -1
        pot[s] = 0
        head = 0
        tail = 0
        order[tail] = s
        tail += 1
        while head < tail:
            u = order[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                e = eid[k]
                if not usable[e]:
                    continue
                w = nbr[k]
                if not seen[w]:
                    seen[w] = 1
                    pedge[w] = e
                    pvert[w] = u
                    pot[w] = pot[u] ^ mem[e]
                    order[tail] = w
                    tail += 1
                elif e != pedge[u] and (pot[u] ^ pot[w] ^ mem[e]) != 0:
                    ambiguous = True
        # peel this component from the leaves inward
        for i in range(tail - 1, 0, -1):
            u = order[i]
            if lit[u]:
                correction[pedge[u]] ^= 1
                lit[u] = 0
                lit[pvert[u]] ^= 1
        if lit[s]:
            ok = False
            lit[s] = 0
    return ok, ambiguous


@njit
def peel(indptr, nbr, eid, mem, erased, lit, correction, work, seen):
    """Peeling decoder; ``lit`` is consumed.  Returns ``(ok, ambiguous)``."""
    for e in range(correction.shape[0]):
        correction[e] = 0
    return _forest_peel(indptr, nbr, eid, erased, lit, correction, work, seen, mem)


@njit
def _find(parent, x):
    r = x
    while parent[r] != r:
        r = parent[r]
    while parent[x] != r:
        nx = parent[x]
        parent[x] = r
        x = nx
    return r


@njit
def _union(parent, size, par, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return ra
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    par[ra] ^= par[rb]
    return ra


@njit
def union_find(ends, indptr, nbr, eid, mem, erased, lit, correction, support, grown, work, seen):
    """Union-find decoder; ``lit`` is consumed.  Returns ``(ok, ambiguous)``.

    Erased edges start fully grown.  Every round the smallest odd clusters
    grow all their boundary edges by a half-edge; edges reaching full
    support merge the clusters at their ends.  The grown edges are then
    peeled.
    """
    n = indptr.shape[0] - 1
    E = ends.shape[0]
    parent = work[0:n]
    size = work[n:2 * n]
    par = seen
    for v in range(n):
        parent[v] = v
        size[v] = 1
        par[v] = lit[v]
    for e in range(E):
        if erased[e]:
            support[e] = 2
            grown[e] = 1
            _union(parent, size, par, ends[e, 0], ends[e, 1])
        else:
            support[e] = 0
            grown[e] = 0
    fused = work[4 * n:4 * n + E]
    for _ in range(4 * E + 4 * n + 4):
        # only the smallest odd clusters grow this round
        smallest = n + 1
        for v in range(n):
            if parent[v] == v and par[v] and size[v] < smallest:
                smallest = size[v]
        if smallest > n:
            break
        any_odd = False
        nf = 0
        for e in range(E):
            if support[e] >= 2:
                continue
            ra = _find(parent, ends[e, 0])
            rb = _find(parent, ends[e, 1])
            inc = 0
            if par[ra] and size[ra] == smallest:
                inc += 1
            if rb != ra and par[rb] and size[rb] == smallest:
                inc += 1
            if inc:
                any_odd = True
                support[e] += inc
                if support[e] >= 2:
                    support[e] = 2
                    fused[nf] = e
                    nf += 1
        if not any_odd:
            break
        for i in range(nf):
            e = fused[i]
            grown[e] = 1
            _union(parent, size, par, ends[e, 0], ends[e, 1])
    for e in range(E):
        correction[e] = 0
    return _forest_peel(indptr, nbr, eid, grown, lit, correction, work, seen, mem)


@njit
def run_trials(ends, indptr, nbr, eid, mem, base, trial_start, n_trials, p_erase, p_flip, decoder):
    """Failures among trials ``trial_start .. trial_start + n_trials - 1``."""
    E = ends.shape[0]
    n = indptr.shape[0] - 1
    erased = np.zeros(E, dtype=np.uint8)
    flipped = np.zeros(E, dtype=np.uint8)
    corr = np.zeros(E, dtype=np.uint8)
    lit = np.zeros(n, dtype=np.uint8)
    support = np.zeros(E, dtype=np.uint8)
    grown = np.zeros(E, dtype=np.uint8)
    work = np.zeros(4 * n + E, dtype=np.int64)
    seen = np.zeros(n, dtype=np.uint8)
    failures = 0
    for t in range(trial_start, trial_start + n_trials):
        key = trial_key(base, t)
        sample_edges(key, E, p_erase, p_flip, erased, flipped)
        syndrome_of(ends, n, flipped, lit)
        if decoder == DEC_PEEL:
            ok, amb = peel(indptr, nbr, eid, mem, erased, lit, corr, work, seen)
        else:
            ok, amb = union_find(ends, indptr, nbr, eid, mem, erased, lit, corr, support, grown, work, seen)
        if not ok or membrane_parity(mem, flipped, corr) != 0:
            failures += 1
    return failures
