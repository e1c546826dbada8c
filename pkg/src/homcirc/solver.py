"""Minimum-cost non-negative integer circulations in a fixed homology class.

Orientable instances are solved as an exact LP whose optimal vertices are
integral.  Non-orientable instances go through a finite set of closed-walk
classes ``Omega`` (cheapest bounded walk per ``(q, p)`` label) followed by a
fixed-row integer program over those classes.
"""
from __future__ import annotations

import heapq
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .embedding import EmbeddedDigraph, Walk, characteristic_flow, is_circulation
from .errors import (
    GenusCapExceeded,
    InternalInconsistency,
    InvalidInput,
    NonIntegralVertex,
    NotOrientable,
    OrientableInput,
)
from .homology import (
    NonOrientableBasis,
    OrientableBasis,
    Surface,
    check_homologous,
    homology_basis,
    orientable_eta,
    recover_eta,
)
from .linalg import SimplexLP

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
DEFAULT_GENUS_CAP = 4


@dataclass
class SolveResult:
    status: str
    x: list[int] | None = None
    objective: Fraction | None = None
    witness: tuple[int, ...] | None = None
    stats: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass(frozen=True)
class OmegaEntry:
    q: tuple[int, ...]
    p: int
    walk: Walk
    cost: Fraction


def _validate(G: EmbeddedDigraph, y: Sequence) -> list[int]:
    if len(y) != G.n_arcs:
        raise InvalidInput(f"y has {len(y)} entries, instance has {G.n_arcs} arcs")
    if any(isinstance(v, bool) or int(v) != v for v in y):
        raise InvalidInput("y must be an integer vector")
    y = [int(v) for v in y]
    if not is_circulation(G, y):
        raise InvalidInput("y is not a circulation")
    if any(c < 0 for c in G.cost):
        raise InvalidInput("arc costs must be non-negative")
    return y


def _scaled_costs(G: EmbeddedDigraph) -> tuple[list[int], int]:
    """Integer costs and the common denominator they were scaled by."""
    den = 1
    for c in G.cost:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c * den) for c in G.cost], den


def _thread_cap(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("HOMCIRC_THREADS")
        threads = int(env) if env else 1
    return max(1, threads)


def solve(
    G: EmbeddedDigraph,
    y: Sequence[int],
    *,
    witness: bool = False,
    tube_radius: int | None = None,
    genus_cap: int = DEFAULT_GENUS_CAP,
    threads: int | None = None,
    seed: int | None = None,
    surface: Surface | None = None,
    basis=None,
) -> SolveResult:
    y = _validate(G, y)
    t0 = time.perf_counter()
    S = surface or Surface.of(G)
    if not S.orientable and S.genus > genus_cap:
        raise GenusCapExceeded(f"non-orientable genus {S.genus} exceeds the cap {genus_cap}")
    if basis is None:
        basis = homology_basis(S, seed)
    t_basis = time.perf_counter() - t0
    if S.orientable:
        res = solve_orientable(G, y, basis, surface=S, witness=witness)
    else:
        res = solve_nonorientable(
            G, y, basis, surface=S, witness=witness, tube_radius=tube_radius,
            genus_cap=genus_cap, threads=threads,
        )
    res.stats["genus"] = S.genus
    res.stats["orientable"] = S.orientable
    res.stats["basis_seconds"] = round(t_basis, 6)
    if res.optimal:
        _assert_feasible(S, res.x, y, basis)
    return res


def _assert_feasible(S: Surface, x, y, basis):
    if any(v < 0 for v in x) or not is_circulation(S.graph, x):
        raise InternalInconsistency("solver returned an infeasible circulation")
    if not check_homologous(x, y, basis, S):
        raise InternalInconsistency("solver returned a circulation in the wrong class")


# -- orientable ----------------------------------------------------------------


def solve_orientable(
    G: EmbeddedDigraph,
    y: Sequence[int],
    basis: OrientableBasis,
    *,
    surface: Surface | None = None,
    witness: bool = False,
) -> SolveResult:
    y = _validate(G, y)
    S = surface or Surface.of(G)
    if not S.orientable:
        raise NotOrientable("solve_orientable needs an orientable instance")
    t0 = time.perf_counter()
    rows, rhs = [], []
    for v in range(G.n_nodes):
        rows.append([(G.tail[a] == v) - (G.head[a] == v) for a in range(G.n_arcs)])
        rhs.append(0)
    for vec in basis.vectors:
        rows.append(list(vec))
        rhs.append(sum(a * b for a, b in zip(vec, y)))
    lp = SimplexLP(rows, rhs)
    res = lp.minimize(G.cost)
    stats = {"lp_pivots": lp.pivots, "lp_rows": len(rows), "solve_seconds": 0.0}
    if res.status == "infeasible":
        stats["solve_seconds"] = round(time.perf_counter() - t0, 6)
        return SolveResult(INFEASIBLE, stats=stats)
    if res.status != "optimal":
        raise InternalInconsistency("homology LP with non-negative costs is unbounded")
    if any(v.denominator != 1 for v in res.x):
        raise NonIntegralVertex("optimal LP vertex is not integral")
    x = [int(v) for v in res.x]
    eta = None
    if witness:
        z = [a - b for a, b in zip(x, y)]
        sol = orientable_eta(z, S)
        if sol is None or any(v.denominator != 1 for v in sol):
            raise InternalInconsistency("no integral witness for an optimal circulation")
        eta = tuple(int(v) for v in sol)
    stats["solve_seconds"] = round(time.perf_counter() - t0, 6)
    return SolveResult(OPTIMAL, x, res.value, eta, stats)


# -- closed-walk classes ----------------------------------------------------------


def _label_matrix(basis: NonOrientableBasis, n_arcs: int):
    """Per-arc label increments: ``q`` from the ``w_i``, ``p`` from the parity vector."""
    dq = [tuple(w[a] for w in basis.vectors) for a in range(n_arcs)]
    return dq, list(basis.parity)


def _omega_source(task):
    """Cheapest bounded closed walks from one source, keyed by ``(q, p)``.

    States are packed into one int ``(qidx * 2 + p) * n + v`` with ``qidx``
    the mixed-radix code of ``q + B``.  The heap key ``cost * L + length``
    (``L`` exceeds any shortest-path length) orders by cost, then length,
    then packed state, so runs are deterministic.
    """
    s, n, out, head, cost, dq, parity, B = task
    k = len(dq[0]) if dq else 0
    W = 2 * B + 1
    radix = [W ** i for i in range(k)]
    n_states = n * 2 * W ** k
    L = n_states + 1
    step = []
    for a in range(len(head)):
        code = sum(d * r for d, r in zip(dq[a], radix))
        step.append((code, parity[a], any(dq[a]), cost[a] * L + 1, head[a]))
    adj = [[step[a] for a in out[v]] for v in range(n)]
    adj_id = [list(out[v]) for v in range(n)]
    top = 2 * B
    start = (sum(B * r for r in radix) * 2) * n + s
    dense = n_states <= 4_000_000
    if dense:
        dist = [-1] * n_states
        pred = [-1] * n_states
        dist[start] = 0
    else:
        dist = {start: 0}
        pred = {}
    heap = [(0, start)]
    found = {}
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        key, sid = pop(heap)
        if (dist[sid] if dense else dist.get(sid)) != key:
            continue
        rest, v = divmod(sid, n)
        if v == s and key:
            found[rest] = sid
        qidx, p = rest >> 1, rest & 1
        digits = None
        for idx, (code, pa, moves, w, hd) in enumerate(adj[v]):
            if moves:
                if k == 1:
                    if not 0 <= qidx + code <= top:
                        continue
                else:
                    if digits is None:
                        digits = _digits(qidx, k, W)
                    if any(not 0 <= x + dx <= top for x, dx in zip(digits, dq[adj_id[v][idx]])):
                        continue
            nsid = ((((qidx + code) << 1) | (p ^ pa)) * n) + hd
            nk = key + w
            if dense:
                old = dist[nsid]
                if old < 0 or nk < old:
                    dist[nsid] = nk
                    pred[nsid] = sid * len(head) + adj_id[v][idx]
                    push(heap, (nk, nsid))
            else:
                old = dist.get(nsid)
                if old is None or nk < old:
                    dist[nsid] = nk
                    pred[nsid] = sid * len(head) + adj_id[v][idx]
                    push(heap, (nk, nsid))
    m = len(head)
    result = {}
    for rest, sid in found.items():
        key = dist[sid]
        arcs = []
        cur = sid
        while cur != start:
            cur, a = divmod(pred[cur], m)
            arcs.append(a)
        arcs.reverse()
        q = tuple(r - B for r in _digits(rest >> 1, k, W))
        result[(q, rest & 1)] = (key // L, key % L, s, tuple(arcs))
    return result


def _digits(qidx: int, k: int, W: int) -> list[int]:
    out = []
    for _ in range(k):
        qidx, r = divmod(qidx, W)
        out.append(r)
    return out


def enumerate_omega(
    G: EmbeddedDigraph,
    basis: NonOrientableBasis,
    *,
    bound: int | None = None,
    threads: int | None = None,
) -> dict[tuple[tuple[int, ...], int], OmegaEntry]:
    """Cheapest closed directed walk for every reachable ``(q, p)`` label.

    Walks are restricted to those whose every prefix has ``|q| <= bound``
    coordinatewise (default ``2 |V|``).  The empty walk supplies label
    ``(0, 0)``.
    """
    B = 2 * G.n_nodes if bound is None else bound
    icost, den = _scaled_costs(G)
    dq, parity = _label_matrix(basis, G.n_arcs)
    out = G.out_arcs()
    tasks = [(s, G.n_nodes, out, G.head, icost, dq, parity, B) for s in range(G.n_nodes)]
    workers = min(_thread_cap(threads), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_omega_source, tasks))
    else:
        parts = [_omega_source(t) for t in tasks]
    best: dict = {}
    for part in parts:
        for label, val in part.items():
            if label not in best or val < best[label]:
                best[label] = val
    k = len(basis.vectors)
    omega = {((0,) * k, 0): OmegaEntry((0,) * k, 0, Walk(0, ()), Fraction(0))}
    for (q, p), (c, ln, s, arcs) in sorted(best.items()):
        if (q, p) in omega:
            continue  # the empty walk is never beaten
        omega[(q, p)] = OmegaEntry(q, p, Walk(s, tuple((a, True) for a in arcs)), Fraction(c, den))
    return omega


def prune_omega(omega, basis: NonOrientableBasis, G: EmbeddedDigraph):
    """Drop entries that two other entries replace at no greater cost.

    Entries are ranked by ``(cost, length, label)``.  An entry is dropped when
    two entries of lower rank have labels summing to its own and costs summing
    to at most its cost; by induction on rank every dropped entry is then a
    non-negative combination of kept ones that costs no more.  Candidate
    pairs are first taken from splitting the walk at a repeated node (cheap),
    then from all lower-ranked entries.
    """
    dq, parity = _label_matrix(basis, G.n_arcs)
    k = len(basis.vectors)
    zero = ((0,) * k, 0)
    order = sorted(omega.values(), key=lambda E: (E.cost, len(E.walk), E.q, E.p))
    rank = {(E.q, E.p): i for i, E in enumerate(order)}

    def lower(label, r):
        return label != zero and label in rank and rank[label] < r

    kept = {}
    for label, E in omega.items():
        if label == zero:
            continue
        r = rank[label]
        arcs = [a for a, _ in E.walk.steps]
        L = len(arcs)
        # prefix labels along the walk
        pre_q = [[0] * k]
        pre_p = [0]
        for a in arcs:
            pre_q.append([x + d for x, d in zip(pre_q[-1], dq[a])])
            pre_p.append(pre_p[-1] ^ parity[a])
        seq = E.walk.node_sequence(G)
        dominated = False
        for i in range(L):
            for j in range(i + 1, L + 1):
                if (i, j) == (0, L) or seq[i] != seq[j]:
                    continue
                q1 = tuple(pre_q[j][t] - pre_q[i][t] for t in range(k))
                p1 = pre_p[j] ^ pre_p[i]
                q2 = tuple(E.q[t] - q1[t] for t in range(k))
                p2 = E.p ^ p1
                if not (lower((q1, p1), r) and lower((q2, p2), r)):
                    continue
                if omega[(q1, p1)].cost + omega[(q2, p2)].cost <= E.cost:
                    dominated = True
                    break
            if dominated:
                break
        if not dominated:
            kept[label] = E
    # any two lower-ranked entries summing to a survivor's label
    result = {}
    for label, E in kept.items():
        r = rank[label]
        dominated = False
        for E1 in order[:r]:
            if (E1.q, E1.p) == zero or E1.cost > E.cost:
                continue
            rest = (tuple(a - b for a, b in zip(E.q, E1.q)), E.p ^ E1.p)
            if lower(rest, r) and E1.cost + omega[rest].cost <= E.cost:
                dominated = True
                break
        if not dominated:
            result[label] = E
    return result


# -- fixed-row integer program -------------------------------------------------------


def _in_tube(r, d, R) -> bool:
    """Whether ``r`` lies within l-infinity distance ``R`` of the segment ``[0, d]``.

    Each coordinate confines the segment parameter ``t`` to an interval; the
    point is inside iff the intervals and ``[0, 1]`` intersect.  Interval ends
    are kept as integer fractions ``num / den`` with ``den > 0``.
    """
    lo_n, lo_d, hi_n, hi_d = 0, 1, 1, 1
    for ri, di in zip(r, d):
        if di == 0:
            if abs(ri) > R:
                return False
            continue
        if di > 0:
            a, b, den = ri - R, ri + R, di
        else:
            a, b, den = -(ri + R), -(ri - R), -di
        if a * lo_d > lo_n * den:
            lo_n, lo_d = a, den
        if b * hi_d < hi_n * den:
            hi_n, hi_d = b, den
        if lo_n * hi_d > hi_n * lo_d:
            return False
    return True


def default_tube_radius(columns, d) -> int:
    g = len(d) + 1
    delta = max([abs(v) for c in columns for v in c.q] + [abs(v) for v in d] + [1])
    return 2 * g * delta


@dataclass
class IPResult:
    status: str
    counts: dict | None = None
    objective: Fraction | None = None
    states: int = 0


def solve_fixed_row_ip(entries, d: Sequence[int], e: int, *, tube_radius: int | None = None) -> IPResult:
    """Cheapest multiset of entries whose labels sum to ``(d, e)``.

    Shortest path over partial sums ``(r, parity)`` confined to a tube around
    the segment from 0 to ``d``; each transition adds one entry.  States are
    packed into ints over the tube's bounding box and keyed by
    ``cost * L + steps``, so ties resolve by fewest entries, then packed state.
    """
    d = tuple(int(v) for v in d)
    e = int(e) & 1
    k = len(d)
    columns = [E for label, E in sorted(entries.items()) if any(E.q) or E.p]
    R = default_tube_radius(columns, d) if tube_radius is None else int(tube_radius)
    if R < 0:
        raise InvalidInput("tube radius must be non-negative")
    den = 1
    for E in columns:
        den = den * E.cost.denominator // math.gcd(den, E.cost.denominator)
    lo = [min(0, di) - R for di in d]
    size = [abs(di) + 2 * R + 1 for di in d]
    radix = [1] * k
    for i in range(1, k):
        radix[i] = radix[i - 1] * size[i - 1]
    volume = radix[-1] * size[-1] if k else 1
    L = 2 * volume + 1
    moves = []
    for E in columns:
        code = sum(q * r for q, r in zip(E.q, radix))
        moves.append((code, E.p, int(E.cost * den) * L + 1, E.q))

    def encode(r):
        return sum((ri - li) * ra for ri, li, ra in zip(r, lo, radix))

    start = encode((0,) * k) * 2
    goal = encode(d) * 2 + e
    coords = {start: (0,) * k}
    tube = {}
    dist = {start: 0}
    pred = {start: None}
    heap = [(0, start)]
    popped = 0
    found = False
    while heap:
        key, sid = heapq.heappop(heap)
        if dist[sid] != key:
            continue
        popped += 1
        if sid == goal:
            found = True
            break
        r = coords[sid]
        b = sid & 1
        base = sid >> 1
        for j, (code, p, w, q) in enumerate(moves):
            nr = tuple(x + y for x, y in zip(r, q))
            inside = tube.get(nr)
            if inside is None:
                inside = tube[nr] = _in_tube(nr, d, R)
            if not inside:
                continue
            ncode = base + code  # no carries: tube points lie inside the box
            coords[ncode * 2] = coords[ncode * 2 + 1] = nr
            ns = ncode * 2 + (b ^ p)
            nk = key + w
            old = dist.get(ns)
            if old is None or nk < old:
                dist[ns] = nk
                pred[ns] = (sid, j)
                heapq.heappush(heap, (nk, ns))
    if not found:
        return IPResult(INFEASIBLE, states=popped)
    counts: dict = {}
    cur = goal
    while pred[cur] is not None:
        cur, j = pred[cur]
        label = (columns[j].q, columns[j].p)
        counts[label] = counts.get(label, 0) + 1
    return IPResult(OPTIMAL, counts, Fraction(dist[goal] // L, den), popped)


# -- non-orientable ---------------------------------------------------------------


def solve_nonorientable(
    G: EmbeddedDigraph,
    y: Sequence[int],
    basis: NonOrientableBasis,
    *,
    surface: Surface | None = None,
    witness: bool = False,
    tube_radius: int | None = None,
    genus_cap: int = DEFAULT_GENUS_CAP,
    threads: int | None = None,
) -> SolveResult:
    y = _validate(G, y)
    S = surface or Surface.of(G)
    if S.orientable:
        raise OrientableInput("solve_nonorientable needs a non-orientable instance")
    if S.genus > genus_cap:
        raise GenusCapExceeded(f"non-orientable genus {S.genus} exceeds the cap {genus_cap}")
    t0 = time.perf_counter()
    omega = enumerate_omega(G, basis, threads=threads)
    t1 = time.perf_counter()
    columns = prune_omega(omega, basis, G)
    t2 = time.perf_counter()
    d = tuple(sum(w[a] * y[a] for a in range(G.n_arcs)) for w in basis.vectors)
    e = sum(basis.parity[a] * y[a] for a in range(G.n_arcs)) % 2
    ip = solve_fixed_row_ip(columns, d, e, tube_radius=tube_radius)
    t3 = time.perf_counter()
    stats = {
        "omega_size": len(omega),
        "omega_columns": len(columns),
        "dp_states": ip.states,
        "omega_seconds": round(t1 - t0, 6),
        "prune_seconds": round(t2 - t1, 6),
        "dp_seconds": round(t3 - t2, 6),
    }
    if ip.status != OPTIMAL:
        return SolveResult(INFEASIBLE, stats=stats)
    x = [0] * G.n_arcs
    for label, mult in sorted(ip.counts.items()):
        chi = characteristic_flow(columns[label].walk, G.n_arcs)
        x = [a + mult * b for a, b in zip(x, chi)]
    objective = sum((c * v for c, v in zip(G.cost, x)), Fraction(0))
    if objective != ip.objective:
        raise InternalInconsistency("reconstructed circulation cost differs from the IP optimum")
    eta = None
    if witness:
        rec = recover_eta([a - b for a, b in zip(x, y)], basis, S)
        if not (rec.exact and rec.integral):
            raise InternalInconsistency("no integral witness for an optimal circulation")
        eta = tuple(int(v) for v in rec.eta)
    stats["solve_seconds"] = round(time.perf_counter() - t0, 6)
    return SolveResult(OPTIMAL, x, objective, eta, stats)
