"""3-SAT to weighted stable set to homology-constrained circulation.

Literals are non-zero ints in DIMACS style: ``v`` for a variable, ``-v`` for
its negation.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..dual import build_dual
from ..embedding import (
    HEAD,
    TAIL,
    EmbeddedDigraph,
    count_faces,
    euler_genus,
    is_circulation,
    trace_facial_walks,
)
from ..errors import BadParams, BipartiteInput, InternalInconsistency, ParseError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if not self.clauses:
            raise BadParams("formula has no clauses")
        for c in self.clauses:
            if len(c) != 3:
                raise BadParams(f"clause {c} does not have exactly 3 literals")
            if any(lit == 0 or abs(lit) > self.n_vars for lit in c):
                raise BadParams(f"clause {c} mentions an unknown variable")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def satisfiable(self) -> bool:
        """Exhaustive check; meant for tiny formulas."""
        return any(self.satisfied_by(a) for a in itertools.product((False, True), repeat=self.n_vars))


def parse_dimacs(text: str) -> CnfFormula:
    n_vars = None
    lits: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("malformed problem line", line=lineno)
            n_vars = int(parts[2])
            continue
        try:
            lits.extend(int(t) for t in line.split())
        except ValueError:
            raise ParseError("non-integer literal", line=lineno) from None
    if n_vars is None:
        raise ParseError("missing 'p cnf' problem line")
    clauses, cur = [], []
    for lit in lits:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    try:
        return CnfFormula(n_vars, tuple(clauses))
    except BadParams as exc:
        raise ParseError(str(exc)) from None


def random_formula(n_vars: int, n_clauses: int, rng: random.Random) -> CnfFormula:
    clauses = tuple(
        tuple(rng.choice((1, -1)) * rng.randint(1, n_vars) for _ in range(3)) for _ in range(n_clauses)
    )
    return CnfFormula(n_vars, clauses)


# -- stable set ------------------------------------------------------------------


@dataclass(frozen=True)
class StabInstance:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, Fraction], ...]
    threshold: int

    def weight(self, stable: set[str]) -> Fraction:
        return sum((c * ((u in stable) + (v in stable)) for u, v, c in self.edges), Fraction(0))

    def is_stable(self, S: set[str]) -> bool:
        return not any(u in S and v in S for u, v, _ in self.edges)

    def max_weight(self) -> Fraction:
        """Exhaustive maximum over stable sets; meant for tiny graphs."""
        adj = {v: set() for v in self.nodes}
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        gain = {v: Fraction(0) for v in self.nodes}
        for u, v, c in self.edges:
            gain[u] += c
            gain[v] += c
        order = list(self.nodes)
        best = Fraction(0)

        def grow(i, chosen, total):
            nonlocal best
            best = max(best, total)
            for j in range(i, len(order)):
                v = order[j]
                if gain[v] and not (adj[v] & chosen):
                    chosen.add(v)
                    grow(j + 1, chosen, total + gain[v])
                    chosen.discard(v)

        grow(0, set(), Fraction(0))
        return best

    def is_bipartite(self) -> bool:
        adj = {v: [] for v in self.nodes}
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        color = {}
        for s in self.nodes:
            if s in color:
                continue
            color[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if w not in color:
                        color[w] = 1 - color[u]
                        queue.append(w)
                    elif color[w] == color[u]:
                        return False
        return True


def _lit_node(lit: int) -> str:
    return f"x{lit}" if lit > 0 else f"nx{-lit}"


def sat_to_stab(phi: CnfFormula) -> StabInstance:
    """Variable edges of cost 1, clause triangles of cost 1/2, connectors of cost 0.

    The clause node for literal ``l`` is joined to the variable node of its
    negation.  If the result is disconnected, a hub node joined to one node of
    every component by cost-0 edges reconnects it without changing any
    stable-set weight.
    """
    nodes, edges = [], []
    for v in range(1, phi.n_vars + 1):
        nodes += [f"x{v}", f"nx{v}"]
        edges.append((f"x{v}", f"nx{v}", Fraction(1)))
    for j, clause in enumerate(phi.clauses):
        tri = [f"c{j}_{i}" for i in range(3)]
        nodes += tri
        for i in range(3):
            edges.append((tri[i], tri[(i + 1) % 3], HALF))
        for i, lit in enumerate(clause):
            edges.append((tri[i], _lit_node(-lit), Fraction(0)))
    inst = StabInstance(tuple(nodes), tuple(edges), phi.n_vars + len(phi.clauses))
    reps = _component_representatives(inst)
    if len(reps) > 1:
        hub = "hub"
        inst = StabInstance(
            inst.nodes + (hub,),
            inst.edges + tuple((hub, r, Fraction(0)) for r in reps),
            inst.threshold,
        )
    return inst


def _component_representatives(I: StabInstance) -> list[str]:
    adj = {v: [] for v in I.nodes}
    for u, v, _ in I.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen, reps = set(), []
    for s in I.nodes:
        if s in seen:
            continue
        reps.append(s)
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return reps


# -- embedding and circulation ------------------------------------------------------


def _embed(I: StabInstance, rotation: dict) -> EmbeddedDigraph:
    arcs = [(f"e{i}", u, v) for i, (u, v, _) in enumerate(I.edges)]
    sig = {f"e{i}": -1 for i in range(len(arcs))}
    cost = {f"e{i}": c for i, (_, _, c) in enumerate(I.edges)}
    return EmbeddedDigraph(I.nodes, arcs, rotation, sig, cost)


def _bfs_rotation(I: StabInstance, rng: random.Random) -> dict:
    """Darts at each node ordered by the BFS discovery index of the neighbour."""
    inc = {v: [] for v in I.nodes}
    for i, (u, v, _) in enumerate(I.edges):
        inc[u].append((f"e{i}", TAIL, v))
        inc[v].append((f"e{i}", HEAD, u))
    for v in inc:
        rng.shuffle(inc[v])
    root = I.nodes[0]
    index = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for _, _, w in inc[u]:
            if w not in index:
                index[w] = len(index)
                queue.append(w)
    return {v: [(a, end) for a, end, _ in sorted(inc[v], key=lambda t: index[t[2]])] for v in I.nodes}


def _face_count(I: StabInstance, rotation: dict) -> int:
    cycles = [[2 * int(a[1:]) + end for a, end in rotation[v]] for v in I.nodes]
    return count_faces(cycles, [True] * len(I.edges))


def _int_rotation(I: StabInstance, rotation: dict) -> list[list[int]]:
    return [[2 * int(a[1:]) + end for a, end in rotation[v]] for v in I.nodes]


def _str_rotation(I: StabInstance, cycles: list[list[int]]) -> dict:
    return {v: [(f"e{d >> 1}", d & 1) for d in cyc] for v, cyc in zip(I.nodes, cycles)}


def _improve_faces(I: StabInstance, rotation: dict, rng: random.Random, target_faces: int) -> tuple[dict, int]:
    """First-improvement local search over dart moves within one rotation."""
    cycles = _int_rotation(I, rotation)
    negative = [True] * len(I.edges)
    faces = count_faces(cycles, negative)
    improved = True
    while improved and faces < target_faces:
        improved = False
        order = [i for i, cyc in enumerate(cycles) if len(cyc) > 2]
        rng.shuffle(order)
        for v in order:
            rot = cycles[v]
            moves = [(i, j) for i in range(len(rot)) for j in range(len(rot)) if i != j]
            rng.shuffle(moves)
            for i, j in moves:
                cand = list(rot)
                cand.insert(j, cand.pop(i))
                cycles[v] = cand
                f2 = count_faces(cycles, negative)
                if f2 > faces:
                    faces, improved = f2, True
                    break
                cycles[v] = rot
            if improved:
                break
    return _str_rotation(I, cycles), faces


def low_genus_rotation(I: StabInstance, seed: int = 0, restarts: int = 8) -> dict:
    """Seeded BFS-order rotations refined by local search; best of several restarts."""
    rng = random.Random(seed)
    # faces of a cellular embedding with all-negative signatures have even length
    target = min(len(I.edges) // 2, 1 - len(I.nodes) + len(I.edges))
    best, best_faces = None, -1
    for _ in range(max(1, restarts)):
        rot, faces = _improve_faces(I, _bfs_rotation(I, rng), rng, target)
        if faces > best_faces:
            best, best_faces = rot, faces
        if best_faces >= target:
            break
    return best


@dataclass(frozen=True)
class CirculationInstance:
    graph: EmbeddedDigraph
    y: tuple[int, ...]
    budget: Fraction
    primal: EmbeddedDigraph


def stab_to_circulation(I: StabInstance, seed: int = 0, *, restarts: int = 8) -> CirculationInstance:
    """Embed the stable-set graph with all signatures -1 and dualise.

    Rotations come from :func:`low_genus_rotation` (``restarts=0`` keeps the
    plain seeded BFS order).  Dual arcs are directed the way the dual facial
    walks traverse them, so that the all-ones vector is a circulation.
    """
    if I.is_bipartite():
        raise BipartiteInput("the reduction needs a non-bipartite graph")
    if restarts:
        rotation = low_genus_rotation(I, seed, restarts)
    else:
        rotation = _bfs_rotation(I, random.Random(seed))
    G = _embed(I, rotation)
    g, orientable = euler_genus(G)
    if orientable:
        raise InternalInconsistency("all-negative signatures on an odd cycle must be non-orientable")
    dual = build_dual(G)
    D = dual.instance
    walks = trace_facial_walks(D).walks
    flip = _orient_walks(D, walks)
    reverse = []
    for w, o in zip(walks, flip):
        for a, fwd in w.steps:
            if fwd != (o == 1):
                reverse.append(D.arc_ids[a])
    D = D.reverse_arcs(sorted(set(reverse)))
    y = (1,) * D.n_arcs
    if not is_circulation(D, y):
        raise InternalInconsistency("all-ones vector is not a circulation of the dual digraph")
    budget = sum((c for _, _, c in I.edges), Fraction(0)) - I.threshold
    return CirculationInstance(D, y, budget, G)


def _orient_walks(D: EmbeddedDigraph, walks) -> list[int]:
    """Choose a direction per walk so every arc is traversed the same way by both of its walks."""
    occ: dict[int, list[tuple[int, bool]]] = {}
    for f, w in enumerate(walks):
        for a, fwd in w.steps:
            occ.setdefault(a, []).append((f, fwd))
    o = [0] * len(walks)
    for s in range(len(walks)):
        if o[s]:
            continue
        o[s] = 1
        queue = deque([s])
        while queue:
            f = queue.popleft()
            for a, fwd in walks[f].steps:
                for g, gfwd in occ[a]:
                    want = o[f] if gfwd == fwd else -o[f]
                    if g == f:
                        if want != o[f]:
                            raise InternalInconsistency("a facial walk uses an arc in both directions")
                    elif o[g] == 0:
                        o[g] = want
                        queue.append(g)
                    elif o[g] != want:
                        raise InternalInconsistency("dual facial walks cannot be directed consistently")
    return o


def sat_to_circulation(phi: CnfFormula, seed: int = 0, *, restarts: int = 8) -> CirculationInstance:
    return stab_to_circulation(sat_to_stab(phi), seed, restarts=restarts)
