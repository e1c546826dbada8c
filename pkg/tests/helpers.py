"""Instance builders and independent checks shared by the test modules.

Nothing here calls into the homology or solver code: spanning trees,
fundamental cycles and random circulations are rebuilt from scratch so the
tests do not share bugs with the library.
"""
from __future__ import annotations

import random
from collections import deque

import numpy as np

from homcirc.embedding import EmbeddedDigraph


def random_graph(rng: random.Random, n: int, m: int, *, p_negative: float = 0.25) -> EmbeddedDigraph:
    """Connected random digraph with a random rotation system and signature."""
    arcs = []
    for i in range(1, n):
        j = rng.randrange(i)
        arcs.append((f"t{i}", *((i, j) if rng.random() < 0.5 else (j, i))))
    for k in range(m - (n - 1)):
        arcs.append((f"x{k}", rng.randrange(n), rng.randrange(n)))
    darts = {v: [] for v in range(n)}
    for aid, t, h in arcs:
        darts[t].append((aid, "tail"))
        darts[h].append((aid, "head"))
    for v in darts:
        rng.shuffle(darts[v])
    sig = {aid: (-1 if rng.random() < p_negative else 1) for aid, _, _ in arcs}
    return EmbeddedDigraph(range(n), arcs, darts, sig)


def undirected_cycle_space(G: EmbeddedDigraph) -> list[list[int]]:
    """Fundamental cycle vectors of a BFS tree, one per non-tree arc."""
    adj = [[] for _ in range(G.n_nodes)]
    for a in range(G.n_arcs):
        adj[G.tail[a]].append((a, G.head[a], 1))
        adj[G.head[a]].append((a, G.tail[a], -1))
    parent = {0: None}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for a, v, s in adj[u]:
            if v not in parent:
                parent[v] = (a, u, s)
                queue.append(v)
    tree = {p[0] for p in parent.values() if p}

    def to_root(v):
        vec = [0] * G.n_arcs
        while parent[v] is not None:
            a, u, s = parent[v]
            vec[a] += s  # path root -> v goes u -> v
            v = u
        return vec

    basis = []
    for a in range(G.n_arcs):
        if a in tree:
            continue
        # root -> tail, arc, head -> root
        pt, ph = to_root(G.tail[a]), to_root(G.head[a])
        vec = [x - y for x, y in zip(pt, ph)]
        vec[a] += 1
        basis.append(vec)
    return basis


def random_circulation(G: EmbeddedDigraph, rng: random.Random, spread: int = 2) -> list[int]:
    z = [0] * G.n_arcs
    for vec in undirected_cycle_space(G):
        c = rng.randint(-spread, spread)
        z = [a + c * b for a, b in zip(z, vec)]
    return z


def conserves_flow(G: EmbeddedDigraph, x) -> bool:
    bal = [0] * G.n_nodes
    for a, v in enumerate(x):
        bal[G.tail[a]] -= v
        bal[G.head[a]] += v
    return not any(bal)


def boundary_np(S) -> np.ndarray:
    return np.array(S.boundary, dtype=np.int64).reshape(S.graph.n_arcs, S.n_faces)


def matmul_check(S, x, y, eta) -> bool:
    """``x == y + boundary @ eta`` by numpy matrix multiplication."""
    eta = np.array(eta, dtype=np.int64)
    return bool(np.array_equal(np.array(x, dtype=np.int64), np.array(y, dtype=np.int64) + boundary_np(S) @ eta))


def bareiss_det(M) -> int:
    """Fraction-free integer determinant, independent of ``homcirc.linalg``."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]
