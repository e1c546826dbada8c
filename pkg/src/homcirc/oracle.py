"""Brute-force ground truth over boxes of integer face coefficients.

A box search alone can only confirm; negative answers are made conclusive
by exact rational linear algebra (for homology) or exact LP range bounds
(for optimality and infeasibility).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BoxTooLarge, DimensionMismatch
from .homology import Surface
from .linalg import SimplexLP, solve_linear

MAX_BOX_POINTS = 10**8
CHUNK = 1 << 16

YES = "Yes"
NO_WITNESS = "NoWitnessInBox"
OPTIMAL = "Optimal"
INFEASIBLE_IN_BOX = "InfeasibleInBox"


@dataclass(frozen=True)
class EtaBox:
    radius: int
    dimension: int

    def __post_init__(self):
        if self.radius < 0:
            raise BoxTooLarge("box radius must be non-negative")
        if self.size > MAX_BOX_POINTS:
            raise BoxTooLarge(f"box has {self.size} points (limit {MAX_BOX_POINTS})")

    @property
    def size(self) -> int:
        return (2 * self.radius + 1) ** self.dimension

    def chunks(self) -> Iterator[np.ndarray]:
        """All points in lexicographic order, as int64 row blocks."""
        W = 2 * self.radius + 1
        total = self.size
        powers = W ** np.arange(self.dimension - 1, -1, -1, dtype=np.int64)
        for lo in range(0, total, CHUNK):
            idx = np.arange(lo, min(total, lo + CHUNK), dtype=np.int64)
            yield (idx[:, None] // powers[None, :]) % W - self.radius


def _matrix(S: Surface) -> np.ndarray:
    return np.array(S.boundary, dtype=np.int64).reshape(S.graph.n_arcs, S.n_faces)


def _as_ints(v: Sequence, n: int, name: str) -> list[int]:
    if len(v) != n:
        raise DimensionMismatch(f"{name} has {len(v)} entries, expected {n}")
    return [int(t) for t in v]


# -- homology --------------------------------------------------------------------


@dataclass(frozen=True)
class IntegerSolvability:
    """Exact verdict on ``boundary @ eta = z`` having an integer solution.

    ``solvable`` is ``None`` when the rational solution space has dimension
    above one and the check gives up.
    """

    solvable: bool | None
    eta: tuple[int, ...] | None = None


def integer_solvability(S: Surface, z: Sequence[int]) -> IntegerSolvability:
    sol = solve_linear(S.boundary, list(z), S.n_faces)
    if sol is None:
        return IntegerSolvability(False)
    p = sol.particular
    if not sol.kernel:
        if all(v.denominator == 1 for v in p):
            return IntegerSolvability(True, tuple(int(v) for v in p))
        return IntegerSolvability(False)
    if len(sol.kernel) > 1:
        return IntegerSolvability(None)
    k = sol.kernel[0]
    den = math.lcm(*(v.denominator for v in k))
    k = [v * den for v in k]
    g = math.gcd(*(int(v) for v in k))
    k = [v / g for v in k]  # primitive integer direction
    # integral points of p + t k form t0 + Z or nothing; search t in [0, 1)
    j = next(i for i, v in enumerate(k) if v)
    kj = int(k[j])
    for m in range(abs(kj)):
        t = (m - p[j]) / kj
        t -= math.floor(t)
        cand = [a + t * b for a, b in zip(p, k)]
        if all(v.denominator == 1 for v in cand):
            return IntegerSolvability(True, tuple(int(v) for v in cand))
    return IntegerSolvability(False)


@dataclass(frozen=True)
class OracleHomology:
    verdict: str
    eta: tuple[int, ...] | None
    refuted: bool


def oracle_homologous(x: Sequence[int], y: Sequence[int], S: Surface, box: EtaBox | int) -> OracleHomology:
    """Search the box for ``eta`` with ``x - y = boundary @ eta``.

    ``refuted`` is True only when exact linear algebra shows that no integer
    ``eta`` exists anywhere.
    """
    n = S.graph.n_arcs
    z = np.array(_as_ints(x, n, "x"), dtype=np.int64) - np.array(_as_ints(y, n, "y"), dtype=np.int64)
    if isinstance(box, int):
        box = EtaBox(box, S.n_faces)
    M = _matrix(S)
    for block in box.chunks():
        hit = np.nonzero(np.all(block @ M.T == z[None, :], axis=1))[0]
        if hit.size:
            return OracleHomology(YES, tuple(int(v) for v in block[hit[0]]), False)
    verdict = integer_solvability(S, z.tolist())
    return OracleHomology(NO_WITNESS, None, verdict.solvable is False)


def oracle_enumerate_class(y: Sequence[int], S: Surface, box: EtaBox | int) -> list[tuple[int, ...]]:
    """Distinct circulations ``y + boundary @ eta`` over the box, sorted."""
    n = S.graph.n_arcs
    yv = np.array(_as_ints(y, n, "y"), dtype=np.int64)
    if isinstance(box, int):
        box = EtaBox(box, S.n_faces)
    M = _matrix(S)
    seen = set()
    for block in box.chunks():
        X = yv[None, :] + block @ M.T
        seen.update(map(tuple, X.tolist()))
    return sorted(seen)


# -- optimisation -----------------------------------------------------------------


@dataclass(frozen=True)
class OracleSolve:
    status: str
    x: tuple[int, ...] | None
    objective: Fraction | None
    eta: tuple[int, ...] | None
    conclusive: bool
    lp_feasible: bool


def _eta_lp(S: Surface, y: list[int], bound: Fraction | None):
    """LP over ``eta = u - v`` (u, v >= 0) with ``y + boundary @ eta >= 0``.

    With ``bound`` given, also ``cost . (y + boundary @ eta) <= bound``.  When
    the boundary map has a kernel one face is anchored at zero.
    Returns the LP and the number of face variables.
    """
    A = S.boundary
    nA, nF = S.graph.n_arcs, S.n_faces
    c = S.graph.cost
    extra = 1 if bound is not None else 0
    n_vars = 2 * nF + nA + extra
    rows, rhs = [], []
    for a in range(nA):
        row = [0] * n_vars
        for f in range(nF):
            row[f] = A[a][f]
            row[nF + f] = -A[a][f]
        row[2 * nF + a] = -1
        rows.append(row)
        rhs.append(-y[a])
    if bound is not None:
        row = [Fraction(0)] * n_vars
        for f in range(nF):
            cf = sum(c[a] * A[a][f] for a in range(nA))
            row[f] = cf
            row[nF + f] = -cf
        row[-1] = 1
        rows.append(row)
        rhs.append(bound - sum(ci * yi for ci, yi in zip(c, y)))
    sol = solve_linear(A, [0] * nA, nF)
    anchor = None
    if sol.kernel:
        if len(sol.kernel) > 1:
            return None, None
        k = sol.kernel[0]
        anchor = next((f for f, v in enumerate(k) if v), None)
        if any(v not in (0, k[anchor], -k[anchor]) for v in k):
            return None, None
        row = [0] * n_vars
        row[anchor] = 1
        row[nF + anchor] = -1
        rows.append(row)
        rhs.append(0)
    return SimplexLP(rows, rhs), nF


def _box_certifies(S: Surface, y: list[int], bound: Fraction | None, K: int) -> bool:
    """True when every real feasible ``eta`` of cost at most ``bound`` fits the box.

    With ``bound=None`` only non-negativity constrains ``eta``.

    Up to kernel shifts, which keep integrality when the kernel direction has
    unit entries.
    """
    lp, nF = _eta_lp(S, y, bound)
    if lp is None or not lp.feasible:
        return lp is not None
    n = len(lp.T[0]) - 1
    for f in range(nF):
        for sign in (1, -1):
            obj = [0] * n
            obj[f] = -sign
            obj[nF + f] = sign
            res = lp.minimize(obj)
            if res.status != "optimal" or -res.value > K:
                return False
    return True


def lp_feasible(S: Surface, y: Sequence[int]) -> bool:
    """Whether some real ``eta`` makes ``y + boundary @ eta`` non-negative."""
    nA, nF = S.graph.n_arcs, S.n_faces
    rows, rhs = [], []
    for a in range(nA):
        row = [0] * (2 * nF + nA)
        for f in range(nF):
            row[f] = S.boundary[a][f]
            row[nF + f] = -S.boundary[a][f]
        row[2 * nF + a] = -1
        rows.append(row)
        rhs.append(-int(y[a]))
    return SimplexLP(rows, rhs).feasible


def oracle_solve(y: Sequence[int], S: Surface, box: EtaBox | int) -> OracleSolve:
    """Exhaustive minimum of ``cost . (y + boundary @ eta)`` over the box.

    Ties go to the lexicographically first ``eta``.  ``conclusive`` reports
    whether the answer is provably the global one: for an optimum, the box
    contains every real ``eta`` reaching that cost; for infeasibility, the
    real relaxation is infeasible or all of its ``eta`` lie in the box.
    """
    G = S.graph
    n = G.n_arcs
    yl = _as_ints(y, n, "y")
    yv = np.array(yl, dtype=np.int64)
    if isinstance(box, int):
        box = EtaBox(box, S.n_faces)
    den = math.lcm(*(c.denominator for c in G.cost)) if n else 1
    icost = np.array([int(c * den) for c in G.cost], dtype=np.int64)
    M = _matrix(S)
    best = None
    for block in box.chunks():
        X = yv[None, :] + block @ M.T
        ok = np.all(X >= 0, axis=1)
        if not ok.any():
            continue
        idx = np.nonzero(ok)[0]
        vals = X[idx] @ icost
        i = int(np.argmin(vals))
        if best is None or vals[i] < best[0]:
            best = (int(vals[i]), tuple(int(v) for v in X[idx[i]]), tuple(int(v) for v in block[idx[i]]))
    feasible = lp_feasible(S, yl)
    if best is None:
        conclusive = not feasible or _box_certifies(S, yl, None, box.radius)
        return OracleSolve(INFEASIBLE_IN_BOX, None, None, None, conclusive, feasible)
    objective = Fraction(best[0], den)
    conclusive = _box_certifies(S, yl, objective, box.radius)
    return OracleSolve(OPTIMAL, best[1], objective, best[2], conclusive, feasible)
