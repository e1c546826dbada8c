"""Homology bases and exact homology tests for integer circulations.

Orientable surfaces: ``g`` dual cycles ``C_i`` built from a primal spanning
tree ``K`` and a dual spanning tree avoiding ``K``; ``x ~ y`` iff
``<x - y, xi(C_i)> = 0`` for all ``i``.

Non-orientable surfaces: a dual spanning 1-tree whose cycle ``C*`` is
one-sided, a primal spanning tree ``K`` avoiding it, and ``g - 1`` two-sided
dual closed walks ``W_i``.  With ``w_i = xi(W_i)`` and ``h`` the indicator of
the arcs crossed by ``C*``, ``x ~ y`` iff ``w_i . (x - y) = 0`` for all ``i``
and ``h . (x - y)`` is even.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dual import DualGraph, boundary_matrix, build_dual, xi
from .embedding import (
    HEAD,
    TAIL,
    EmbeddedDigraph,
    FacialWalkSet,
    Walk,
    euler_genus,
    is_circulation,
    make_dart,
    trace_facial_walks,
)
from .errors import (
    DimensionMismatch,
    InternalInconsistency,
    NotACirculation,
    NotOrientable,
    OrientableInput,
)
from .linalg import det, mat_vec, minor, solve_linear


@dataclass(frozen=True)
class Surface:
    """Everything derived once from an embedded digraph."""

    graph: EmbeddedDigraph
    faces: FacialWalkSet
    dual: DualGraph
    boundary: list[list[int]]
    genus: int
    orientable: bool

    @classmethod
    def of(cls, G: EmbeddedDigraph) -> Surface:
        F = trace_facial_walks(G)
        g, orientable = euler_genus(G, F)
        return cls(G, F, build_dual(G, F), boundary_matrix(G, F), g, orientable)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def boundary_of(self, eta: Sequence) -> list:
        return mat_vec(self.boundary, eta)


# -- tree helpers --------------------------------------------------------------


def _scan_order(n_arcs: int, seed: int | None) -> list[int] | None:
    if seed is None:
        return None
    order = list(range(n_arcs))
    random.Random(seed).shuffle(order)
    rank = [0] * n_arcs
    for r, a in enumerate(order):
        rank[a] = r
    return rank


class _Tree:
    """BFS spanning tree of an embedded graph restricted to ``allowed`` arcs."""

    def __init__(self, G: EmbeddedDigraph, allowed=None, root: int = 0, order=None):
        adj = G.adjacency()
        if order is not None:
            adj = [sorted(nb, key=lambda t: order[t[0]]) for nb in adj]
        self.G = G
        self.root = root
        self.parent: dict[int, tuple[int, int] | None] = {root: None}
        self.depth = {root: 0}
        self.arcs: set[int] = set()
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for a, w in adj[v]:
                if allowed is not None and a not in allowed:
                    continue
                if w not in self.parent:
                    self.parent[w] = (a, v)
                    self.depth[w] = self.depth[v] + 1
                    self.arcs.add(a)
                    queue.append(w)

    def spans(self) -> bool:
        return len(self.parent) == self.G.n_nodes

    def path_arcs(self, u: int, v: int) -> list[tuple[int, int]]:
        """Tree path from ``u`` to ``v`` as ``(arc, node left)`` steps."""
        up, down = [], []
        while u != v:
            if self.depth[u] >= self.depth[v]:
                a, p = self.parent[u]
                up.append((a, u))
                u = p
            else:
                a, p = self.parent[v]
                down.append((a, p))
                v = p
        return up + down[::-1]


def _leave(G: EmbeddedDigraph, a: int, u: int) -> int:
    """Dart of arc ``a`` at node ``u`` (the tail dart for loops)."""
    return make_dart(a, TAIL if G.tail[a] == u else HEAD)


def _walk_from(G: EmbeddedDigraph, start: int, steps: Sequence[tuple[int, int]]) -> Walk:
    """Walk from ``(arc, node left)`` steps."""
    out = []
    for a, u in steps:
        out.append((a, G.tail[a] == u))
    W = Walk(start, tuple(out))
    W.node_sequence(G)
    return W


def _fundamental_cycle(tree: _Tree, a: int, start: int | None = None) -> Walk:
    """Cycle formed by non-tree arc ``a`` and the tree path closing it."""
    G = tree.G
    u, w = G.tail[a], G.head[a]
    steps = [(a, u)] + tree.path_arcs(w, u)
    W = _walk_from(G, u, steps)
    if start is not None:
        W = _rotate_to(G, W, start)
    return W


def _rotate_to(G: EmbeddedDigraph, W: Walk, node: int) -> Walk:
    seq = W.node_sequence(G)
    i = seq.index(node)
    steps = W.steps[i:] + W.steps[:i]
    return Walk(node, steps)


def _concat(G: EmbeddedDigraph, *walks: Walk) -> Walk:
    steps = []
    for W in walks:
        steps.extend(W.steps)
    out = Walk(walks[0].start, tuple(steps))
    out.node_sequence(G)
    return out


def _reverse(G: EmbeddedDigraph, W: Walk) -> Walk:
    end = W.end(G)
    return Walk(end, tuple((a, not fwd) for a, fwd in reversed(W.steps)))


# -- bases ------------------------------------------------------------------


@dataclass(frozen=True)
class OrientableBasis:
    genus: int
    tree: frozenset[int]
    dual_tree: frozenset[int]
    generators: tuple[int, ...]
    cycles: tuple[Walk, ...]
    vectors: tuple[tuple[int, ...], ...]

    orientable = True


@dataclass(frozen=True)
class NonOrientableBasis:
    genus: int
    one_sided_cycle: Walk
    cycle_arcs: tuple[int, ...]
    cycle_faces: tuple[int, ...]
    dual_tree: frozenset[int]
    one_tree: frozenset[int]
    tree: frozenset[int]
    extra_arcs: tuple[int, ...]
    walks: tuple[Walk, ...]
    vectors: tuple[tuple[int, ...], ...]
    parity: tuple[int, ...]

    orientable = False

    def cycle_block(self, boundary) -> list[list[int]]:
        """Rows of the boundary matrix for the cycle arcs, columns for its faces."""
        return [[boundary[a][f] for f in self.cycle_faces] for a in self.cycle_arcs]


def orientable_basis(S: Surface, seed: int | None = None) -> OrientableBasis:
    if not S.orientable:
        raise NotOrientable("orientable_basis needs an orientable surface")
    G, dual = S.graph, S.dual
    rng_root = random.Random(seed).randrange(G.n_nodes) if seed is not None else 0
    K = _Tree(G, root=rng_root, order=_scan_order(G.n_arcs, seed))
    allowed = set(range(G.n_arcs)) - K.arcs
    droot = random.Random(seed).randrange(dual.n_nodes) if seed is not None else 0
    T = _Tree(dual.instance, allowed, root=droot, order=_scan_order(G.n_arcs, seed))
    if not T.spans():
        raise InternalInconsistency("dual graph minus the cotree is disconnected")
    gens = tuple(a for a in range(G.n_arcs) if a not in K.arcs and a not in T.arcs)
    if len(gens) != S.genus:
        raise InternalInconsistency(f"expected {S.genus} generators, found {len(gens)}")
    cycles = tuple(_fundamental_cycle(T, a) for a in gens)
    vectors = tuple(tuple(xi(dual, C)) for C in cycles)
    for C, vec in zip(cycles, vectors):
        if C.sign(dual.instance) != 1:
            raise InternalInconsistency("one-sided dual cycle on an orientable surface")
        for f in range(S.n_faces):
            if sum(S.boundary[a][f] * vec[a] for a in range(G.n_arcs)) != 0:
                raise InternalInconsistency("facial circulation violates a homology constraint")
    return OrientableBasis(S.genus, frozenset(K.arcs), frozenset(T.arcs), gens, cycles, vectors)


def find_one_sided_fundamental_cycle(dual: DualGraph, seed: int | None = None):
    """A one-sided cycle made of a dual spanning tree plus one non-tree edge.

    Returns ``(cycle, tree, closing_arc)``.
    """
    D = dual.instance
    root = random.Random(seed).randrange(D.n_nodes) if seed is not None else 0
    order = _scan_order(D.n_arcs, seed)
    T = _Tree(D, root=root, order=order)
    pot = {root: 1}
    for v in sorted(T.depth, key=T.depth.get):
        if T.parent[v] is not None:
            a, p = T.parent[v]
            pot[v] = pot[p] * D.signature[a]
    candidates = [a for a in range(D.n_arcs) if a not in T.arcs]
    if order is not None:
        candidates.sort(key=lambda a: order[a])
    for a in candidates:
        if pot[D.tail[a]] * pot[D.head[a]] * D.signature[a] == -1:
            return _fundamental_cycle(T, a), T, a
    raise OrientableInput("the dual embedding has no one-sided cycle")


def _cycle_arcs(W: Walk) -> set[int]:
    return {a for a, _ in W.steps}


def _walk_on_edge_cycle(D: EmbeddedDigraph, edges: set[int], first: int, start: int) -> Walk:
    """Traverse the simple cycle formed by ``edges``, starting along ``first`` from ``start``."""
    inc: dict[int, list[int]] = {}
    for a in edges:
        inc.setdefault(D.tail[a], []).append(a)
        inc.setdefault(D.head[a], []).append(a)
    steps = []
    a, u = first, start
    used = set()
    while True:
        steps.append((a, u))
        used.add(a)
        u = D.head[a] if D.tail[a] == u else D.tail[a]
        if len(used) == len(edges):
            break
        a = next(b for b in inc[u] if b not in used)
    if u != start:
        raise InternalInconsistency("edge set does not form a cycle")
    return _walk_from(D, start, steps)


def nonorientable_basis(S: Surface, seed: int | None = None) -> NonOrientableBasis:
    if S.orientable:
        raise OrientableInput("nonorientable_basis needs a non-orientable surface")
    G, dual = S.graph, S.dual
    D = dual.instance
    cstar, T0, closing = find_one_sided_fundamental_cycle(dual, seed)
    one_tree = set(T0.arcs) | {closing}
    cycle_arcs = _cycle_arcs(cstar)
    allowed = set(range(G.n_arcs)) - one_tree
    K = _Tree(G, allowed, order=_scan_order(G.n_arcs, seed))
    if not K.spans():
        raise InternalInconsistency("primal graph minus the dual 1-tree is disconnected")
    extra = tuple(a for a in range(G.n_arcs) if a not in K.arcs and a not in one_tree)
    if len(extra) != S.genus - 1:
        raise InternalInconsistency(f"expected {S.genus - 1} extra arcs, found {len(extra)}")

    cnodes = set(cstar.node_sequence(D))
    walks = []
    for b in extra:
        Z = _fundamental_cycle(T0, b)
        if Z.sign(D) == 1:
            walks.append(Z)
            continue
        shared = _cycle_arcs(Z) & cycle_arcs
        if shared:
            u = D.tail[b]
            walks.append(_walk_on_edge_cycle(D, _cycle_arcs(Z) ^ cycle_arcs, b, u))
            continue
        # C* once, tree path to Z, around Z, back along the same path
        znodes = set(Z.node_sequence(D))
        p, q = _nearest_pair(T0, cnodes, znodes)
        path = _walk_from(D, p, T0.path_arcs(p, q))
        walks.append(_concat(
            D,
            _rotate_to(D, cstar, p),
            path,
            _rotate_to(D, Z, q),
            _reverse(D, path),
        ))
    for W in walks:
        if W.sign(D) != 1 or W.end(D) != W.start:
            raise InternalInconsistency("homology walk is not a two-sided closed walk")
    vectors = tuple(tuple(xi(dual, W)) for W in walks)
    parity = tuple(int(a in cycle_arcs) for a in range(G.n_arcs))
    cycle_faces = []
    for f in cstar.node_sequence(D)[:-1]:
        if f not in cycle_faces:
            cycle_faces.append(f)
    basis = NonOrientableBasis(
        genus=S.genus,
        one_sided_cycle=cstar,
        cycle_arcs=tuple(a for a, _ in cstar.steps),
        cycle_faces=tuple(cycle_faces),
        dual_tree=frozenset(T0.arcs),
        one_tree=frozenset(one_tree),
        tree=frozenset(K.arcs),
        extra_arcs=extra,
        walks=tuple(walks),
        vectors=vectors,
        parity=parity,
    )
    if abs(det(basis.cycle_block(S.boundary))) != 2:
        raise InternalInconsistency("boundary block of the one-sided cycle does not have |det| = 2")
    return basis


def _nearest_pair(T: _Tree, A: set[int], B: set[int]) -> tuple[int, int]:
    """Closest pair ``(p in A, q in B)`` in the tree, ties broken by node index."""
    D = T.G
    adj = [[] for _ in range(D.n_nodes)]
    for a in T.arcs:
        adj[D.tail[a]].append(D.head[a])
        adj[D.head[a]].append(D.tail[a])
    origin = {p: p for p in sorted(A)}
    queue = deque(sorted(A))
    while queue:
        v = queue.popleft()
        if v in B:
            return origin[v], v
        for w in sorted(adj[v]):
            if w not in origin:
                origin[w] = origin[v]
                queue.append(w)
    raise InternalInconsistency("dual tree does not connect the two cycles")


def homology_basis(S: Surface, seed: int | None = None):
    return orientable_basis(S, seed) if S.orientable else nonorientable_basis(S, seed)


# -- homology tests -----------------------------------------------------------


def _difference(S: Surface, x: Sequence[int], y: Sequence[int]) -> list[int]:
    n = S.graph.n_arcs
    if len(x) != n or len(y) != n:
        raise DimensionMismatch(f"circulations must have {n} entries")
    if not is_circulation(S.graph, x) or not is_circulation(S.graph, y):
        raise NotACirculation("homology is only defined between circulations")
    return [int(a) - int(b) for a, b in zip(x, y)]


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v) if a)


def check_homologous(x: Sequence[int], y: Sequence[int], basis, S: Surface | None = None) -> bool:
    """Decide whether two integer circulations are Z-homologous."""
    if S is not None:
        z = _difference(S, x, y)
    else:
        if len(x) != len(y):
            raise DimensionMismatch("circulations of different length")
        z = [int(a) - int(b) for a, b in zip(x, y)]
    if any(len(v) != len(z) for v in basis.vectors) or (not basis.orientable and len(basis.parity) != len(z)):
        raise DimensionMismatch("basis built for a different instance")
    if any(_dot(v, z) for v in basis.vectors):
        return False
    if basis.orientable:
        return True
    return _dot(basis.parity, z) % 2 == 0


@dataclass(frozen=True)
class EtaRecovery:
    eta: tuple[Fraction, ...]
    integral: bool
    real_homologous: bool
    exact: bool


def recover_eta(z: Sequence[int], basis: NonOrientableBasis, S: Surface) -> EtaRecovery:
    """Face coefficients matching ``z`` on the dual 1-tree arcs.

    Solves the one-sided cycle block exactly and extends along the dual
    spanning tree.  ``exact`` reports whether ``boundary @ eta == z`` holds on
    every arc, which is the case precisely when ``z`` satisfies the ``w_i``
    equations.
    """
    D = S.dual.instance
    bd = S.boundary
    block = basis.cycle_block(bd)
    sol = solve_linear(block, [z[a] for a in basis.cycle_arcs], len(basis.cycle_faces))
    if sol is None or sol.kernel:
        raise InternalInconsistency("one-sided cycle block is singular")
    eta: dict[int, Fraction] = dict(zip(basis.cycle_faces, sol.particular))
    adj: dict[int, list[int]] = {}
    for a in basis.dual_tree:
        adj.setdefault(D.tail[a], []).append(a)
        adj.setdefault(D.head[a], []).append(a)
    queue = deque(sorted(eta))
    while queue:
        f = queue.popleft()
        for a in sorted(adj.get(f, ())):
            g = D.head[a] if D.tail[a] == f else D.tail[a]
            if g in eta:
                continue
            eta[g] = (z[a] - bd[a][f] * eta[f]) / bd[a][g]
            queue.append(g)
    if len(eta) != S.n_faces:
        raise InternalInconsistency("dual tree does not reach every face")
    vec = tuple(eta[f] for f in range(S.n_faces))
    integral = all(v.denominator == 1 for v in vec)
    walk_eqs = all(_dot(w, z) == 0 for w in basis.vectors)
    exact = list(S.boundary_of(vec)) == list(z)
    if walk_eqs and not exact:
        raise InternalInconsistency("homology equations hold but z != boundary(eta)")
    return EtaRecovery(vec, integral, walk_eqs, exact)


def orientable_eta(z: Sequence[int], S: Surface) -> tuple[Fraction, ...] | None:
    """Face coefficients with face 0 anchored at 0, or ``None`` if none exist."""
    D = S.dual.instance
    bd = S.boundary
    T = _Tree(D)
    eta = {0: Fraction(0)}
    for f in sorted(T.depth, key=T.depth.get):
        if T.parent[f] is None:
            continue
        a, p = T.parent[f]
        eta[f] = (z[a] - bd[a][p] * eta[p]) / bd[a][f]
    vec = tuple(eta[f] for f in range(S.n_faces))
    return vec if list(S.boundary_of(vec)) == list(z) else None


def homology_witness(x: Sequence[int], y: Sequence[int], basis, S: Surface) -> tuple[int, ...] | None:
    """Integer ``eta`` with ``x = y + boundary @ eta`` or ``None``."""
    z = _difference(S, x, y)
    if S.orientable:
        eta = orientable_eta(z, S)
    else:
        rec = recover_eta(z, basis, S)
        eta = rec.eta if rec.exact else None
    if eta is None or any(v.denominator != 1 for v in eta):
        return None
    return tuple(int(v) for v in eta)
