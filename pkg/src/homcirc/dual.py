"""Dual graph, boundary matrix and signed crossing vectors of dual walks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .embedding import (
    HEAD,
    TAIL,
    EmbeddedDigraph,
    FacialWalkSet,
    Walk,
    dart_arc,
    dart_end,
    make_dart,
    trace_facial_walks,
)


@dataclass(frozen=True)
class DualGraph:
    """The dual of an embedded digraph, itself stored as an embedding.

    ``instance`` has one node per face (ids ``f0, f1, ...``) and one arc per
    primal arc with the same id.  The dual arc's tail is the occurrence in the
    lower-indexed face (or the earlier position for a dual loop), its head the
    other occurrence.  ``crossing[d]`` is +1 when the face occurrence behind
    dual dart ``d`` traverses the primal arc from tail to head, else -1.
    """

    primal: EmbeddedDigraph
    faces: FacialWalkSet
    instance: EmbeddedDigraph
    dart_slot: tuple[tuple[int, int], ...]
    crossing: tuple[int, ...]

    @property
    def signature(self) -> tuple[int, ...]:
        return self.instance.signature

    @property
    def n_nodes(self) -> int:
        return self.instance.n_nodes

    def ends(self, a: int) -> tuple[int, int]:
        return self.instance.tail[a], self.instance.head[a]

    def is_loop(self, a: int) -> bool:
        return self.instance.is_loop(a)


def face_id(f: int) -> str:
    return f"f{f}"


def build_dual(G: EmbeddedDigraph, F: FacialWalkSet | None = None) -> DualGraph:
    if F is None:
        F = trace_facial_walks(G)
    arcs, sig = [], {}
    dart_slot = [None] * (2 * G.n_arcs)
    crossing = [0] * (2 * G.n_arcs)
    for a, (s0, s1) in enumerate(F.occurrences):
        s0, s1 = sorted((s0, s1))
        aid = G.arc_ids[a]
        arcs.append((aid, face_id(s0[0]), face_id(s1[0])))
        fwd0, fwd1 = F.forward(*s0), F.forward(*s1)
        sig[aid] = 1 if fwd0 != fwd1 else -1
        for end, slot, fwd in ((TAIL, s0, fwd0), (HEAD, s1, fwd1)):
            d = make_dart(a, end)
            dart_slot[d] = slot
            crossing[d] = 1 if fwd else -1
    slot_dart = {slot: d for d, slot in enumerate(dart_slot)}
    rotation = {}
    for f, walk in enumerate(F.walks):
        rotation[face_id(f)] = [
            (G.arc_ids[dart_arc(slot_dart[(f, pos)])], dart_end(slot_dart[(f, pos)]))
            for pos in range(len(walk))
        ]
    instance = EmbeddedDigraph(
        [face_id(f) for f in range(len(F))],
        arcs,
        rotation,
        sig,
        G.cost_map(),
    )
    return DualGraph(G, F, instance, tuple(dart_slot), tuple(crossing))


def face_sign(dual: DualGraph, a: int, f: int) -> int:
    """Sign with which face ``f`` uses arc ``a``.

    Zero when ``f`` does not use the arc or uses it twice in opposite
    directions; otherwise +1 for tail-to-head traversal and -1 for the reverse.
    """
    uses = [dual.crossing[make_dart(a, e)] for e in (TAIL, HEAD) if dual.dart_slot[make_dart(a, e)][0] == f]
    if not uses:
        return 0
    if len(uses) == 2 and uses[0] != uses[1]:
        return 0
    return uses[0]


def boundary_matrix(G: EmbeddedDigraph, F: FacialWalkSet) -> list[list[int]]:
    """Dense ``|A| x |F|`` matrix whose column ``f`` is the characteristic flow of face ``f``."""
    D = [[0] * len(F) for _ in range(G.n_arcs)]
    for f, walk in enumerate(F.walks):
        for a, fwd in walk.steps:
            D[a][f] += 1 if fwd else -1
    return D


def dual_walk(dual: DualGraph, start: int, darts: Sequence[int]) -> Walk:
    """Build a walk in the dual from a start face and the darts it leaves through."""
    steps = tuple((dart_arc(d), dart_end(d) == TAIL) for d in darts)
    W = Walk(start, steps)
    W.node_sequence(dual.instance)  # validates incidence
    return W


def xi(dual: DualGraph, H: Walk) -> list[int]:
    """Signed crossing vector of a dual walk.

    Each step adds, at the crossed primal arc, the crossing sign of the dart
    it leaves through times the signature product of all earlier steps.
    """
    out = [0] * dual.primal.n_arcs
    prefix = 1
    for a, fwd in H.steps:
        d = make_dart(a, TAIL if fwd else HEAD)
        out[a] += prefix * dual.crossing[d]
        prefix *= dual.signature[a]
    return out


def walk_sign(dual: DualGraph, H: Walk) -> int:
    return H.sign(dual.instance)
