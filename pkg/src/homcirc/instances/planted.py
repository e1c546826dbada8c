"""Random embeddings of prescribed surface type and planted test instances.

A planted instance fixes a non-negative circulation ``x*`` and integer face
coefficients ``eta*`` and sets ``y = x* - boundary @ eta*``; ``x*`` is then a
feasible answer whose certificate lies in a small box.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..embedding import EmbeddedDigraph, Walk, characteristic_flow, euler_genus
from ..errors import BadParams
from ..linalg import mat_vec
from .families import random_scheme


def random_embedding(
    rng: random.Random,
    genus: int,
    orientable: bool,
    *,
    max_arcs: int = 24,
    max_faces: int = 6,
    tries: int = 20000,
) -> EmbeddedDigraph:
    """Rejection-sample a random scheme with the requested surface type."""
    if orientable and genus % 2:
        raise BadParams("orientable surfaces have even Euler genus")
    for _ in range(tries):
        n = rng.randint(1, 6)
        faces = rng.randint(1, max_faces)
        # |V| - |E| + |F| = 2 - g
        m = n + faces + genus - 2
        if m < max(n - 1, 1) or m > max_arcs:
            continue
        G = random_scheme(n, m, rng.randrange(1 << 30), p_negative=0.0 if orientable else 0.5)
        g, o = euler_genus(G)
        if g == genus and o == orientable:
            return G
    raise BadParams(f"no random embedding with genus {genus} found in {tries} tries")


def random_directed_cycle(G: EmbeddedDigraph, rng: random.Random) -> Walk | None:
    """Follow random out-arcs from a random node until a node repeats."""
    out = G.out_arcs()
    v = rng.randrange(G.n_nodes)
    seen = {v: 0}
    arcs = []
    while True:
        if not out[v]:
            return None
        a = rng.choice(out[v])
        arcs.append(a)
        v = G.head[a]
        if v in seen:
            cyc = arcs[seen[v]:]
            return Walk(G.tail[cyc[0]], tuple((b, True) for b in cyc))
        seen[v] = len(arcs)


@dataclass(frozen=True)
class PlantedInstance:
    graph: EmbeddedDigraph
    y: tuple[int, ...]
    x_star: tuple[int, ...]
    eta_star: tuple[int, ...]


def plant(G: EmbeddedDigraph, boundary, rng: random.Random, *, cycles: int = 2,
          eta_radius: int = 1) -> PlantedInstance:
    x = [0] * G.n_arcs
    for _ in range(rng.randint(0, cycles)):
        C = random_directed_cycle(G, rng)
        if C is not None:
            x = [a + b for a, b in zip(x, characteristic_flow(C, G.n_arcs))]
    n_faces = len(boundary[0]) if boundary else 0
    eta = [rng.randint(-eta_radius, eta_radius) for _ in range(n_faces)]
    d = mat_vec(boundary, eta)
    y = tuple(a - b for a, b in zip(x, d))
    return PlantedInstance(G, y, tuple(x), tuple(eta))
