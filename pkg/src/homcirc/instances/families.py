"""Small named embeddings and random embedding schemes."""
from __future__ import annotations

import random
from fractions import Fraction

from ..embedding import HEAD, TAIL, EmbeddedDigraph, euler_genus
from ..errors import BadParams


def sphere_cycle(n: int = 3) -> EmbeddedDigraph:
    """Directed ``n``-cycle in the plane."""
    if n < 1:
        raise BadParams("sphere_cycle needs n >= 1")
    arcs = [(f"a{i}", i, (i + 1) % n) for i in range(n)]
    rot = {i: [(f"a{i}", TAIL), (f"a{(i - 1) % n}", HEAD)] for i in range(n)}
    return EmbeddedDigraph(range(n), arcs, rot)


def torus_bouquet() -> EmbeddedDigraph:
    arcs = [("a", 0, 0), ("b", 0, 0)]
    return EmbeddedDigraph([0], arcs, {0: [("a", TAIL), ("b", TAIL), ("a", HEAD), ("b", HEAD)]})


def projective_loop() -> EmbeddedDigraph:
    return EmbeddedDigraph([0], [("a", 0, 0)], {0: [("a", TAIL), ("a", HEAD)]}, {"a": -1})


def klein_bouquet() -> EmbeddedDigraph:
    arcs = [("a", 0, 0), ("b", 0, 0)]
    rot = {0: [("a", TAIL), ("a", HEAD), ("b", TAIL), ("b", HEAD)]}
    return EmbeddedDigraph([0], arcs, rot, {"a": -1, "b": -1})


def _grid(m: int, n: int, twisted: bool) -> EmbeddedDigraph:
    if m < 1 or n < 1:
        raise BadParams("grid dimensions must be positive")

    def node(i, j):
        return f"{i}_{j}"

    arcs, sig = [], {}
    west = {}  # node -> arc arriving from the west
    for j in range(n):
        for i in range(m):
            aid = f"h{i}_{j}"
            if i < m - 1:
                target = (i + 1, j)
            elif twisted:
                target = (0, n - 1 - j)
                sig[aid] = -1
            else:
                target = (0, j)
            arcs.append((aid, node(i, j), node(*target)))
            west[target] = aid
            arcs.append((f"v{i}_{j}", node(i, j), node(i, (j + 1) % n)))
    rot = {}
    for j in range(n):
        for i in range(m):
            rot[node(i, j)] = [
                (f"h{i}_{j}", TAIL),
                (f"v{i}_{j}", TAIL),
                (west[(i, j)], HEAD),
                (f"v{i}_{(j - 1) % n}", HEAD),
            ]
    nodes = [node(i, j) for j in range(n) for i in range(m)]
    return EmbeddedDigraph(nodes, arcs, rot, sig)


def torus_grid(m: int = 3, n: int = 3) -> EmbeddedDigraph:
    """``m x n`` grid with both directions wrapped; arcs point east and north."""
    return _grid(m, n, twisted=False)


def klein_grid(m: int = 3, n: int = 3) -> EmbeddedDigraph:
    """Grid whose east-west wrap reverses the north-south direction."""
    return _grid(m, n, twisted=True)


def random_scheme(n: int = 4, m: int = 6, seed: int = 0, *, p_negative: float = 0.5,
                  max_cost: int = 5) -> EmbeddedDigraph:
    """Random connected digraph with random rotations, signatures and costs.

    A random spanning tree guarantees connectivity; the remaining arcs join
    uniformly random node pairs (loops allowed).
    """
    if n < 1 or m < n - 1:
        raise BadParams("random_scheme needs n >= 1 and m >= n - 1")
    rng = random.Random(seed)
    arcs = []
    for i in range(1, n):
        j = rng.randrange(i)
        arcs.append((f"a{i}",) + ((i, j) if rng.random() < 0.5 else (j, i)))
    for k in range(m - (n - 1)):
        arcs.append((f"b{k}", rng.randrange(n), rng.randrange(n)))
    darts = {v: [] for v in range(n)}
    for aid, t, h in arcs:
        darts[t].append((aid, TAIL))
        darts[h].append((aid, HEAD))
    for v in range(n):
        rng.shuffle(darts[v])
    sig = {aid: -1 if rng.random() < p_negative else 1 for aid, _, _ in arcs}
    cost = {aid: Fraction(rng.randint(1, max_cost)) for aid, _, _ in arcs}
    return EmbeddedDigraph(range(n), arcs, darts, sig, cost)


FAMILIES = {
    "sphere_cycle": sphere_cycle,
    "torus_bouquet": torus_bouquet,
    "torus_grid": torus_grid,
    "projective_loop": projective_loop,
    "klein_bouquet": klein_bouquet,
    "klein_grid": klein_grid,
    "random_scheme": random_scheme,
}


def gen_family(name: str, **params) -> EmbeddedDigraph:
    try:
        make = FAMILIES[name]
    except KeyError:
        raise BadParams(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    try:
        return make(**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {name}: {exc}") from None


def describe_family(G: EmbeddedDigraph) -> tuple[int, bool]:
    return euler_genus(G)
