"""Exact-rational primal simplex for packing LPs.

Solves  max c.x  s.t.  A x <= b,  x >= 0  with b >= 0 over `fractions.Fraction`, so the
all-slack basis is feasible and no first phase is needed. Pivoting follows Bland's rule
(smallest entering variable id, ties in the ratio test broken by the smallest basic id),
which cannot cycle.

The optimal dual of the <= rows is read off the final objective row: y_i is minus the
reduced cost of slack i.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import structlog

from errors import InputError

logger = structlog.get_logger(__name__)

ZERO = Fraction(0)


@dataclass
class LPSolution:
    status: str
    objective: Fraction
    x: List[Fraction]
    y: List[Fraction]
    pivots: int


class ExactSimplex:
    """Dictionary-form tableau; variables 0..n-1 are structural, n..n+m-1 are slacks."""

    def __init__(self, A: Sequence[Sequence], b: Sequence, c: Sequence):
        self.m = len(A)
        self.n = len(c)
        self.A = [[Fraction(v) for v in row] for row in A]
        self.b = [Fraction(v) for v in b]
        self.c = [Fraction(v) for v in c]
        self.z = ZERO
        if len(self.b) != self.m:
            raise InputError(f"Right-hand side has {len(self.b)} entries for {self.m} rows")
        for i, row in enumerate(self.A):
            if len(row) != self.n:
                raise InputError(f"Row {i} has {len(row)} coefficients, expected {self.n}")
            if self.b[i] < 0:
                raise InputError(f"Row {i} has a negative right-hand side; the slack basis would be infeasible")
        self.nonbasic = list(range(self.n))
        self.basic = list(range(self.n, self.n + self.m))
        self.pivots = 0

    def pivot(self, i: int, j: int):
        A, b, c = self.A, self.b, self.c
        piv = A[i][j]
        row = A[i]
        for l in range(self.n):
            row[l] = 1 / piv if l == j else row[l] / piv
        b[i] /= piv
        for k in range(self.m):
            if k == i:
                continue
            factor = A[k][j]
            if factor == 0:
                continue
            other = A[k]
            for l in range(self.n):
                other[l] = -factor / piv if l == j else other[l] - factor * row[l]
            b[k] -= factor * b[i]
        delta = c[j]
        if delta != 0:
            for l in range(self.n):
                c[l] = -delta / piv if l == j else c[l] - delta * row[l]
            self.z += delta * b[i]
        self.nonbasic[j], self.basic[i] = self.basic[i], self.nonbasic[j]
        self.pivots += 1

    def _step(self) -> str:
        entering = [(self.nonbasic[j], j) for j in range(self.n) if self.c[j] > 0]
        if not entering:
            return "optimal"
        _, j = min(entering)
        ratios = [(self.b[i] / self.A[i][j], self.basic[i], i) for i in range(self.m) if self.A[i][j] > 0]
        if not ratios:
            return "unbounded"
        _, _, i = min(ratios)
        self.pivot(i, j)
        return "go_on"

    def solve(self) -> LPSolution:
        status = "go_on"
        while status == "go_on":
            status = self._step()
        x = [ZERO] * self.n
        y = [ZERO] * self.m
        for i, var in enumerate(self.basic):
            if var < self.n:
                x[var] = self.b[i]
        for j, var in enumerate(self.nonbasic):
            if var >= self.n:
                y[var - self.n] = -self.c[j]
        logger.debug("Simplex finished", status=status, pivots=self.pivots, objective=str(self.z))
        return LPSolution(status=status, objective=self.z, x=x, y=y, pivots=self.pivots)


def maximize(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPSolution:
    """max c.x subject to A x <= b, x >= 0 (requires b >= 0)."""
    return ExactSimplex(A, b, c).solve()
