"""Cellularly embedded digraphs given by embedding schemes.

An embedding scheme is a rotation system over *darts* (arc ends) together
with an edge signature.  Darts are encoded as integers ``2 * arc + end``
where ``end`` is :data:`TAIL` or :data:`HEAD`, so ``d ^ 1`` is the other end
of the same arc.  Loops and parallel arcs are therefore unambiguous.

Facial walks are traced on *states* ``(dart, parity)``: the dart about to be
traversed and the parity of negative-signature edges crossed so far.  Each
face shows up as two state orbits that are reverses of each other.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import InternalInconsistency, InvalidInstance, NotACirculation

TAIL = 0
HEAD = 1
END_NAMES = ("tail", "head")


def make_dart(arc: int, end: int) -> int:
    return 2 * arc + end


def dart_arc(d: int) -> int:
    return d >> 1


def dart_end(d: int) -> int:
    return d & 1


class Dart(NamedTuple):
    """Public, id-based view of a dart."""

    arc_id: str
    end: int

    def __str__(self):
        return f"{self.arc_id}{'+' if self.end == TAIL else '-'}"


def _parse_end(end) -> int:
    if end in (TAIL, HEAD) and not isinstance(end, bool):
        return int(end)
    if isinstance(end, str):
        e = end.strip().lower()
        if e in ("tail", "t", "+", "out"):
            return TAIL
        if e in ("head", "h", "-", "in"):
            return HEAD
    raise InvalidInstance(f"unknown dart end {end!r}")


class EmbeddedDigraph:
    """A digraph with a rotation system over darts, signatures and arc costs.

    ``arcs`` is a sequence of ``(arc_id, tail, head)``; ``rotation`` maps each
    node to the cyclic sequence of its darts, each given as ``(arc_id, end)``.
    Node and arc ids are normalised to strings; internally everything is
    indexed by position in ``nodes`` / ``arcs``.  Missing signatures default
    to +1 and missing costs to 1.
    """

    def __init__(
        self,
        nodes: Iterable,
        arcs: Iterable[tuple],
        rotation: Mapping,
        signature: Mapping | None = None,
        cost: Mapping | None = None,
    ):
        self.nodes: tuple[str, ...] = tuple(str(v) for v in nodes)
        self.node_index = {v: i for i, v in enumerate(self.nodes)}
        if len(self.node_index) != len(self.nodes):
            raise InvalidInstance("duplicate node id")
        if not self.nodes:
            raise InvalidInstance("an embedded graph needs at least one node")

        arc_ids, tails, heads = [], [], []
        for a in arcs:
            aid, t, h = (str(x) for x in a)
            if t not in self.node_index or h not in self.node_index:
                raise InvalidInstance(f"arc {aid!r} has an unknown endpoint")
            arc_ids.append(aid)
            tails.append(self.node_index[t])
            heads.append(self.node_index[h])
        self.arc_ids: tuple[str, ...] = tuple(arc_ids)
        self.arc_index = {a: i for i, a in enumerate(self.arc_ids)}
        if len(self.arc_index) != len(self.arc_ids):
            raise InvalidInstance("duplicate arc id")
        self.tail: tuple[int, ...] = tuple(tails)
        self.head: tuple[int, ...] = tuple(heads)

        signature = signature or {}
        sig = []
        for aid in self.arc_ids:
            s = signature.get(aid, 1)
            if s not in (1, -1) or isinstance(s, bool):
                raise InvalidInstance(f"signature of arc {aid!r} must be +1 or -1, got {s!r}")
            sig.append(int(s))
        unknown = set(signature) - set(self.arc_ids)
        if unknown:
            raise InvalidInstance(f"signature given for unknown arcs {sorted(unknown)}")
        self.signature: tuple[int, ...] = tuple(sig)

        cost = cost or {}
        costs = []
        for aid in self.arc_ids:
            c = Fraction(cost.get(aid, 1))
            if c < 0:
                raise InvalidInstance(f"cost of arc {aid!r} is negative")
            costs.append(c)
        unknown = set(cost) - set(self.arc_ids)
        if unknown:
            raise InvalidInstance(f"cost given for unknown arcs {sorted(unknown)}")
        self.cost: tuple[Fraction, ...] = tuple(costs)

        self.rotation: tuple[tuple[int, ...], ...] = self._build_rotation(rotation)
        n_darts = 2 * len(self.arc_ids)
        succ = [0] * n_darts
        pred = [0] * n_darts
        for rot in self.rotation:
            k = len(rot)
            for i, d in enumerate(rot):
                succ[d] = rot[(i + 1) % k]
                pred[d] = rot[(i - 1) % k]
        self.succ: tuple[int, ...] = tuple(succ)
        self.pred: tuple[int, ...] = tuple(pred)
        self._check_connected()

    def _build_rotation(self, rotation: Mapping) -> tuple[tuple[int, ...], ...]:
        rot: list[tuple[int, ...] | None] = [None] * len(self.nodes)
        seen: set[int] = set()
        for v, seq in rotation.items():
            v = str(v)
            if v not in self.node_index:
                raise InvalidInstance(f"rotation given for unknown node {v!r}")
            vi = self.node_index[v]
            darts = []
            for item in seq:
                if isinstance(item, Mapping):
                    aid, end = item.get("arc"), item.get("end")
                else:
                    aid, end = item
                aid = str(aid)
                if aid not in self.arc_index:
                    raise InvalidInstance(f"rotation at {v!r} names unknown arc {aid!r}")
                d = make_dart(self.arc_index[aid], _parse_end(end))
                if d in seen:
                    raise InvalidInstance(f"dart {Dart(aid, dart_end(d))} appears twice in the rotation")
                if self.dart_node(d) != vi:
                    raise InvalidInstance(f"dart {Dart(aid, dart_end(d))} is not incident to node {v!r}")
                seen.add(d)
                darts.append(d)
            rot[vi] = tuple(darts)
        for d in range(2 * len(self.arc_ids)):
            if d not in seen:
                raise InvalidInstance(
                    f"rotation omits dart {Dart(self.arc_ids[dart_arc(d)], dart_end(d))}"
                )
        return tuple(r if r is not None else () for r in rot)

    def _check_connected(self):
        if len(self.nodes) == 1:
            return
        seen = {0}
        queue = deque([0])
        adj = self.adjacency()
        while queue:
            v = queue.popleft()
            for _, w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != len(self.nodes):
            raise InvalidInstance("underlying undirected graph is not connected")

    # -- basic accessors -------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_arcs(self) -> int:
        return len(self.arc_ids)

    def dart_node(self, d: int) -> int:
        a = dart_arc(d)
        return self.tail[a] if dart_end(d) == TAIL else self.head[a]

    def dart_label(self, d: int) -> Dart:
        return Dart(self.arc_ids[dart_arc(d)], dart_end(d))

    def is_loop(self, a: int) -> bool:
        return self.tail[a] == self.head[a]

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Undirected adjacency: ``adj[v]`` lists ``(arc, other endpoint)``."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        for a, (t, h) in enumerate(zip(self.tail, self.head)):
            adj[t].append((a, h))
            if t != h:
                adj[h].append((a, t))
        return adj

    def out_arcs(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.nodes]
        for a, t in enumerate(self.tail):
            out[t].append(a)
        return out

    def cost_map(self) -> dict[str, Fraction]:
        return dict(zip(self.arc_ids, self.cost))

    def signature_map(self) -> dict[str, int]:
        return dict(zip(self.arc_ids, self.signature))

    def rotation_map(self) -> dict[str, list[tuple[str, int]]]:
        return {
            self.nodes[v]: [(self.arc_ids[dart_arc(d)], dart_end(d)) for d in rot]
            for v, rot in enumerate(self.rotation)
        }

    def arc_triples(self) -> list[tuple[str, str, str]]:
        return [
            (aid, self.nodes[t], self.nodes[h])
            for aid, t, h in zip(self.arc_ids, self.tail, self.head)
        ]

    def vector(self, values: Mapping | Sequence | None) -> list[int]:
        """Dense integer vector over the arcs from a mapping or sequence."""
        if values is None:
            return [0] * self.n_arcs
        if isinstance(values, Mapping):
            unknown = set(map(str, values)) - set(self.arc_ids)
            if unknown:
                raise InvalidInstance(f"values given for unknown arcs {sorted(unknown)}")
            vals = {str(k): v for k, v in values.items()}
            return [int(vals.get(a, 0)) for a in self.arc_ids]
        values = list(values)
        if len(values) != self.n_arcs:
            raise InvalidInstance(f"expected {self.n_arcs} entries, got {len(values)}")
        return [int(v) for v in values]

    # -- derived embeddings ----------------------------------------------

    def _rebuild(self, *, arcs=None, rotation=None, signature=None, cost=None) -> EmbeddedDigraph:
        return EmbeddedDigraph(
            self.nodes,
            arcs if arcs is not None else self.arc_triples(),
            rotation if rotation is not None else self.rotation_map(),
            signature if signature is not None else self.signature_map(),
            cost if cost is not None else self.cost_map(),
        )

    def with_costs(self, cost: Mapping) -> EmbeddedDigraph:
        return self._rebuild(cost=cost)

    def reverse_arcs(self, arc_ids: Iterable[str]) -> EmbeddedDigraph:
        """Reverse the direction of the given arcs; the embedding is unchanged."""
        flip = set(map(str, arc_ids))
        arcs = [(a, h, t) if a in flip else (a, t, h) for a, t, h in self.arc_triples()]
        rotation = {
            v: [(a, 1 - e if a in flip else e) for a, e in seq]
            for v, seq in self.rotation_map().items()
        }
        return self._rebuild(arcs=arcs, rotation=rotation)

    def switch(self, node) -> EmbeddedDigraph:
        """Flip the local orientation at ``node``.

        Reverses its rotation and negates the signature of every non-loop edge
        at it; the surface and its facial walks are unchanged.
        """
        v = str(node)
        vi = self.node_index[v]
        rotation = self.rotation_map()
        rotation[v] = list(reversed(rotation[v]))
        sig = self.signature_map()
        for a, aid in enumerate(self.arc_ids):
            if not self.is_loop(a) and vi in (self.tail[a], self.head[a]):
                sig[aid] = -sig[aid]
        return self._rebuild(rotation=rotation, signature=sig)

    def __repr__(self):
        return f"EmbeddedDigraph(|V|={self.n_nodes}, |A|={self.n_arcs})"


# -- walks -------------------------------------------------------------------


@dataclass(frozen=True)
class Walk:
    """A walk in the underlying undirected graph.

    ``steps`` holds ``(arc, forward)`` pairs by arc index; ``forward`` means the
    arc is traversed from tail to head.
    """

    start: int
    steps: tuple[tuple[int, bool], ...] = ()

    def node_sequence(self, G: EmbeddedDigraph) -> list[int]:
        seq = [self.start]
        v = self.start
        for a, fwd in self.steps:
            t, h = G.tail[a], G.head[a]
            if v != (t if fwd else h):
                raise InvalidInstance(f"walk step over arc {G.arc_ids[a]!r} is not incident")
            v = h if fwd else t
            seq.append(v)
        return seq

    def end(self, G: EmbeddedDigraph) -> int:
        return self.node_sequence(G)[-1]

    def is_closed(self, G: EmbeddedDigraph) -> bool:
        return self.end(G) == self.start

    def sign(self, G: EmbeddedDigraph) -> int:
        """Product of signatures over traversed edges; +1 means two-sided."""
        s = 1
        for a, _ in self.steps:
            s *= G.signature[a]
        return s

    def is_directed(self) -> bool:
        return all(fwd for _, fwd in self.steps)

    def __len__(self):
        return len(self.steps)

    def describe(self, G: EmbeddedDigraph) -> list[str]:
        return [G.arc_ids[a] + ("" if fwd else "'") for a, fwd in self.steps]


def characteristic_flow(W: Walk, n_arcs: int) -> list[int]:
    """Net number of forward minus backward traversals of every arc."""
    x = [0] * n_arcs
    for a, fwd in W.steps:
        x[a] += 1 if fwd else -1
    return x


def is_circulation(G: EmbeddedDigraph, x: Sequence) -> bool:
    if len(x) != G.n_arcs:
        return False
    balance = [0] * G.n_nodes
    for a, val in enumerate(x):
        balance[G.tail[a]] += val
        balance[G.head[a]] -= val
    return all(b == 0 for b in balance)


def decompose_into_cycles(G: EmbeddedDigraph, x: Sequence[int]) -> list[tuple[Walk, int]]:
    """Split a non-negative integer circulation into simple directed cycles.

    Returns ``(cycle, multiplicity)`` pairs with ``sum(mult * chi(cycle)) == x``.
    """
    if len(x) != G.n_arcs or any(v < 0 for v in x) or not is_circulation(G, x):
        raise NotACirculation("decomposition needs a non-negative integer circulation")
    rest = [int(v) for v in x]
    out = G.out_arcs()
    result = []
    for a0 in range(G.n_arcs):
        while rest[a0] > 0:
            # follow positive arcs until a node repeats
            path = [a0]
            pos = {G.tail[a0]: 0}
            v = G.head[a0]
            while v not in pos:
                pos[v] = len(path)
                nxt = next(a for a in out[v] if rest[a] > 0)
                path.append(nxt)
                v = G.head[nxt]
            cycle = path[pos[v]:]
            mult = min(rest[a] for a in cycle)
            for a in cycle:
                rest[a] -= mult
            result.append((Walk(G.tail[cycle[0]], tuple((a, True) for a in cycle)), mult))
    return result


# -- facial walks ------------------------------------------------------------


@dataclass(frozen=True)
class FacialWalkSet:
    """One canonical representative per face.

    ``walks[f]`` is the representative as a :class:`Walk`; ``states[f]`` the
    ``(dart, parity)`` state at each position; ``occurrences[a]`` the two
    ``(face, position)`` slots at which arc ``a`` is traversed.
    """

    walks: tuple[Walk, ...]
    states: tuple[tuple[tuple[int, int], ...], ...]
    occurrences: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    state_slot: Mapping[tuple[int, int], tuple[int, int, bool]]

    def __len__(self):
        return len(self.walks)

    def __iter__(self):
        return iter(self.walks)

    def forward(self, f: int, pos: int) -> bool:
        return self.walks[f].steps[pos][1]


def _next_state(G: EmbeddedDigraph, d: int, p: int) -> tuple[int, int]:
    p2 = p ^ (G.signature[dart_arc(d)] < 0)
    o = d ^ 1
    return (G.succ[o] if p2 == 0 else G.pred[o]), p2


def reverse_state(G: EmbeddedDigraph, d: int, p: int) -> tuple[int, int]:
    """The state traversing the same edge backwards in the reversed face walk."""
    return d ^ 1, 1 ^ p ^ (G.signature[dart_arc(d)] < 0)


def count_faces(rotation: Sequence[Sequence[int]], negative: Sequence[bool]) -> int:
    """Number of faces of a scheme given as dart cycles per node and per-arc sign flags.

    Same tracing rule as :func:`trace_facial_walks`, without building an
    :class:`EmbeddedDigraph`; meant for search loops over rotations.
    """
    succ, pred = {}, {}
    for cyc in rotation:
        k = len(cyc)
        for i, d in enumerate(cyc):
            succ[d] = cyc[(i + 1) % k]
            pred[d] = cyc[i - 1]
    seen = set()
    orbits = 0
    for d0 in succ:
        for p0 in (0, 1):
            if (d0, p0) in seen:
                continue
            orbits += 1
            d, p = d0, p0
            while (d, p) not in seen:
                seen.add((d, p))
                p ^= negative[d >> 1]
                o = d ^ 1
                d = succ[o] if p == 0 else pred[o]
    return orbits // 2


def _orbit(G: EmbeddedDigraph, s0: tuple[int, int]) -> list[tuple[int, int]]:
    orbit = [s0]
    s = _next_state(G, *s0)
    while s != s0:
        orbit.append(s)
        s = _next_state(G, *s)
    return orbit


def _min_rotation(seq: list) -> tuple[int, tuple]:
    n = len(seq)
    best, best_i = None, 0
    for i in range(n):
        cand = tuple(seq[i:] + seq[:i])
        if best is None or cand < best:
            best, best_i = cand, i
    return best_i, best


def trace_facial_walks(G: EmbeddedDigraph) -> FacialWalkSet:
    """Trace all faces of the embedding and pick canonical representatives.

    The representative of a face is the lexicographically least, over all
    cyclic shifts of both traversal directions, of its sequence of
    ``(node, arc, end)`` triples.  On orientable surfaces only the direction
    agreeing with a global orientation is eligible, so that every edge is
    used in opposite directions by its two occurrences.
    """
    pot, tree = spanning_tree_potential(G)
    orientable = all(
        pot[G.tail[a]] * pot[G.head[a]] * G.signature[a] == 1
        for a in range(G.n_arcs)
        if a not in tree
    )
    n_states = 4 * G.n_arcs
    orbit_of: dict[tuple[int, int], int] = {}
    orbits: list[list[tuple[int, int]]] = []
    for d in range(2 * G.n_arcs):
        for p in (0, 1):
            if (d, p) in orbit_of:
                continue
            orb = _orbit(G, (d, p))
            for s in orb:
                orbit_of[s] = len(orbits)
            orbits.append(orb)
    assert len(orbit_of) == n_states

    def key(s):
        d = s[0]
        return (G.dart_node(d), dart_arc(d), dart_end(d))

    faces = []
    done: set[int] = set()
    for i, orb in enumerate(orbits):
        if i in done:
            continue
        j = orbit_of[reverse_state(G, *orb[0])]
        if j == i:
            raise InternalInconsistency("a face orbit coincides with its own reversal")
        done.update((i, j))
        candidates = []
        for k in (i, j):
            o = orbits[k]
            if orientable and o[0][1] ^ (pot[G.dart_node(o[0][0])] < 0):
                continue
            shift, seq = _min_rotation([key(s) for s in o])
            candidates.append((seq, o[shift:] + o[:shift]))
        faces.append(min(candidates))
    faces.sort()

    walks, states = [], []
    state_slot: dict[tuple[int, int], tuple[int, int, bool]] = {}
    occ: list[list[tuple[int, int]]] = [[] for _ in range(G.n_arcs)]
    for f, (_, orb) in enumerate(faces):
        start = G.dart_node(orb[0][0])
        steps = tuple((dart_arc(d), dart_end(d) == TAIL) for d, _ in orb)
        walks.append(Walk(start, steps))
        states.append(tuple(orb))
        for pos, s in enumerate(orb):
            state_slot[s] = (f, pos, False)
            state_slot[reverse_state(G, *s)] = (f, pos, True)
            occ[dart_arc(s[0])].append((f, pos))
    for a, o in enumerate(occ):
        if len(o) != 2:
            raise InternalInconsistency(f"arc {G.arc_ids[a]!r} occurs {len(o)} times in the faces")
    return FacialWalkSet(
        walks=tuple(walks),
        states=tuple(states),
        occurrences=tuple((o[0], o[1]) for o in occ),
        state_slot=state_slot,
    )


def spanning_tree_potential(G: EmbeddedDigraph, root: int = 0, order=None) -> tuple[list[int], set[int]]:
    """BFS spanning tree with a +-1 node potential making tree edges positive.

    Returns ``(potential, tree_arcs)``.  ``order`` optionally permutes the
    adjacency scan for randomised trees.
    """
    adj = G.adjacency()
    if order is not None:
        adj = [sorted(nbrs, key=lambda t: order[t[0]]) for nbrs in adj]
    pot = [0] * G.n_nodes
    pot[root] = 1
    tree: set[int] = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for a, w in adj[v]:
            if pot[w] == 0:
                pot[w] = pot[v] * G.signature[a]
                tree.add(a)
                queue.append(w)
    return pot, tree


def is_orientable(G: EmbeddedDigraph) -> bool:
    pot, tree = spanning_tree_potential(G)
    return all(
        pot[G.tail[a]] * pot[G.head[a]] * G.signature[a] == 1
        for a in range(G.n_arcs)
        if a not in tree
    )


def euler_genus(G: EmbeddedDigraph, F: FacialWalkSet | None = None) -> tuple[int, bool]:
    """Euler genus from Euler's formula plus the orientability of the surface."""
    if F is None:
        F = trace_facial_walks(G)
    g = 2 - G.n_nodes + G.n_arcs - len(F)
    orientable = is_orientable(G)
    if g < 0 or (orientable and g % 2):
        raise InternalInconsistency(f"impossible surface: genus {g}, orientable={orientable}")
    return g, orientable
