"""Exact rational linear algebra and a Bland's-rule simplex.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point is involved anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence]


def det(M: Matrix) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [[Fraction(v) for v in row] for row in M]
    if any(len(row) != n for row in A):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        piv = A[c][c]
        result *= piv
        for r in range(c + 1, n):
            if A[r][c] != 0:
                f = A[r][c] / piv
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return sign * result


def minor(M: Matrix, row: int, col: int) -> list[list]:
    return [[v for j, v in enumerate(r) if j != col] for i, r in enumerate(M) if i != row]


def mat_vec(M: Matrix, v: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def transpose(M: Matrix) -> list[list]:
    return [list(col) for col in zip(*M)]


@dataclass
class LinearSolution:
    """Solution set ``particular + span(kernel)`` of a linear system."""

    particular: list[Fraction]
    kernel: list[list[Fraction]]


def solve_linear(A: Matrix, b: Sequence, n_cols: int | None = None) -> LinearSolution | None:
    """All rational solutions of ``A x = b``; ``None`` if inconsistent."""
    m = len(A)
    n = n_cols if n_cols is not None else (len(A[0]) if m else 0)
    R = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        piv = R[r][c]
        R[r] = [x / piv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(R[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = R[i][n]
    free = [c for c in range(n) if c not in set(pivots)]
    kernel = []
    for fc in free:
        k = [Fraction(0)] * n
        k[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            k[c] = -R[i][fc]
        kernel.append(k)
    return LinearSolution(x, kernel)


def rank(A: Matrix) -> int:
    if not A:
        return 0
    sol = solve_linear(A, [0] * len(A))
    return len(A[0]) - len(sol.kernel)


# -- simplex -----------------------------------------------------------------


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] = field(default_factory=list)
    value: Fraction | None = None
    pivots: int = 0


class SimplexLP:
    """``min c x`` subject to ``A x = b, x >= 0``, solved exactly.

    Phase 1 runs once on construction; :meth:`minimize` can then be called
    repeatedly with different objectives, each warm-started from the last
    basis.  Bland's rule guarantees termination.
    """

    def __init__(self, A: Matrix, b: Sequence):
        self.n = len(A[0]) if A else 0
        rows = []
        for row, bi in zip(A, b):
            row = [Fraction(v) for v in row]
            bi = Fraction(bi)
            if bi < 0:
                row, bi = [-v for v in row], -bi
            rows.append(row + [bi])
        self.pivots = 0
        self.feasible = self._phase_one(rows)

    def _pivot(self, T, basis, r, c):
        piv = T[r][c]
        if piv != 1:
            T[r] = [v / piv for v in T[r]]
        pr = T[r]
        for i, row in enumerate(T):
            if i != r:
                f = row[c]
                if f:
                    T[i] = [x - f * y for x, y in zip(row, pr)]
        basis[r] = c
        self.pivots += 1

    def _run(self, T, basis, cost, allowed) -> bool:
        """Primal simplex on tableau ``T``; returns False when unbounded."""
        width = len(cost)
        while True:
            cb = [cost[j] for j in basis]
            enter = None
            for j in range(width):
                if j not in allowed:
                    continue
                rc = cost[j] - sum(cb[i] * T[i][j] for i in range(len(T)) if T[i][j])
                if rc < 0:
                    enter = j
                    break
            if enter is None:
                return True
            leave, best = None, None
            for i, row in enumerate(T):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        leave, best = i, ratio
            if leave is None:
                return False
            self._pivot(T, basis, leave, enter)

    def _phase_one(self, rows) -> bool:
        m, n = len(rows), self.n
        T = [row[:n] + [Fraction(int(i == k)) for k in range(m)] + [row[n]] for i, row in enumerate(rows)]
        basis = list(range(n, n + m))
        cost = [Fraction(0)] * n + [Fraction(1)] * m
        self._run(T, basis, cost, set(range(n + m)))
        if sum(T[i][-1] for i in range(m) if basis[i] >= n) != 0:
            return False
        # drive remaining (zero-valued) artificials out of the basis
        keep = []
        for i in range(m):
            if basis[i] >= n:
                j = next((j for j in range(n) if T[i][j] != 0), None)
                if j is None:
                    continue  # redundant row
                self._pivot(T, basis, i, j)
            keep.append(i)
        self.T = [T[i][:n] + [T[i][-1]] for i in keep]
        self.basis = [basis[i] for i in keep]
        return True

    def solution(self) -> list[Fraction]:
        x = [Fraction(0)] * self.n
        for i, j in enumerate(self.basis):
            x[j] = self.T[i][-1]
        return x

    def minimize(self, c: Sequence) -> LPResult:
        if not self.feasible:
            return LPResult("infeasible", pivots=self.pivots)
        cost = [Fraction(v) for v in c]
        if not self._run(self.T, self.basis, cost, set(range(self.n))):
            return LPResult("unbounded", pivots=self.pivots)
        x = self.solution()
        return LPResult("optimal", x, sum(ci * xi for ci, xi in zip(cost, x)), self.pivots)


def linprog_exact(c: Sequence, A: Matrix, b: Sequence) -> LPResult:
    """One-shot exact LP ``min c x, A x = b, x >= 0``."""
    if not A:
        if any(Fraction(ci) < 0 for ci in c):
            return LPResult("unbounded")
        return LPResult("optimal", [Fraction(0)] * len(c), Fraction(0))
    return SimplexLP(A, b).minimize(c)
