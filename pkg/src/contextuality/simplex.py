"""Exact linear programming over the rationals.

Solves feasibility of ``{M Q = P, Q >= 0}`` and minimization of a linear
objective over that polytope, with no floating point anywhere.  Two-phase
simplex with a deterministic pivot rule: most-negative-reduced-cost entering
(ties to the lowest index), Bland's smallest-index leaving, and a switch to
Bland's entering rule whenever a run of degenerate pivots has made no
progress.  Bland's rule cannot cycle, so termination is guaranteed and
results are a pure function of the input.  An infeasible system comes back
with a Farkas certificate: a row vector ``y`` with ``y^T M <= 0`` and
``y^T P > 0``, checkable by plain substitution.

The tableau is dense.  Each row is stored as integer numerators plus one
positive denominator, and is reduced to lowest terms after every pivot; this
keeps the inner loop in machine/big-int arithmetic instead of per-entry
Fraction objects while remaining exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distribution import ZERO, as_fraction
from .errors import (
    DimensionMismatchError,
    InfeasibleError,
    PivotLimitError,
    UnboundedError,
)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


def _exact(x):
    """Pass ints through untouched; coerce everything else via as_fraction."""
    return x if type(x) is int else as_fraction(x)


@dataclass(frozen=True)
class LinearSystem:
    """Constraint data for ``matrix . Q = rhs`` with ``Q >= 0``.

    Matrix entries may be ints or Fractions (the systems built here are 0/1
    Boolean, but general rationals are accepted).  ``column_labels`` are
    opaque identifiers carried through to solutions.
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    column_labels: tuple[object, ...] | None = None

    def __post_init__(self):
        matrix = tuple(tuple(_exact(x) for x in row) for row in self.matrix)
        rhs = tuple(as_fraction(x) for x in self.rhs)
        if not matrix:
            raise DimensionMismatchError("constraint matrix has no rows")
        width = len(matrix[0])
        if width == 0:
            raise DimensionMismatchError("constraint matrix has no columns")
        for i, row in enumerate(matrix):
            if len(row) != width:
                raise DimensionMismatchError(f"row {i} has {len(row)} entries, expected {width}")
            if not any(row):
                raise DimensionMismatchError(f"row {i} is identically zero")
        if len(rhs) != len(matrix):
            raise DimensionMismatchError(
                f"rhs has {len(rhs)} entries for {len(matrix)} rows"
            )
        labels = self.column_labels
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != width:
                raise DimensionMismatchError(
                    f"{len(labels)} column labels for {width} columns"
                )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "column_labels", labels)

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0])


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a feasibility solve, carrying its witness.

    Exactly one of ``solution`` (nonnegative, satisfying ``M Q = P``) and
    ``certificate`` (Farkas vector over the rows) is present.
    """

    status: str
    solution: tuple[Fraction, ...] | None
    certificate: tuple[Fraction, ...] | None
    pivots: int

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    def verify(self, system: LinearSystem) -> bool:
        """Re-check the witness against the system by exact substitution.

        Vertex solutions and certificates are sparse relative to the matrix,
        so substitution runs over nonzero entries only.
        """
        if self.feasible:
            q = self.solution
            if q is None or len(q) != system.cols or any(x < 0 for x in q):
                return False
            support = [j for j, x in enumerate(q) if x]
            return all(
                sum(row[j] * q[j] for j in support) == b
                for row, b in zip(system.matrix, system.rhs)
            )
        y = self.certificate
        if y is None or len(y) != system.rows:
            return False
        combined = [ZERO] * system.cols
        for weight, row in zip(y, system.matrix):
            if weight:
                for j, a in enumerate(row):
                    if a:
                        combined[j] += weight * a
        if any(entry > 0 for entry in combined):
            return False
        return sum(y[i] * system.rhs[i] for i in range(system.rows)) > 0


@dataclass(frozen=True)
class OptimizationResult:
    """Exact optimum of a linear objective with an attaining vertex."""

    value: Fraction
    solution: tuple[Fraction, ...]
    pivots: int


def _scaled_row(values: Sequence[Fraction]) -> tuple[list[int], int]:
    """Clear denominators: return integer numerators and a positive denominator."""
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    nums = [int(v.numerator * (den // v.denominator)) for v in values]
    return nums, den


def _reduce(nums: list[int], den: int) -> tuple[list[int], int]:
    g = den
    for a in nums:
        if a:
            g = math.gcd(g, a)
            if g == 1:
                return nums, den
    if g > 1:
        nums = [a // g for a in nums]
        den //= g
    return nums, den


class _Tableau:
    """Dense two-phase simplex state on integer-scaled rows.

    Column layout: ``n`` structural variables, ``m`` artificials, then the
    right-hand side.  ``self.rows[i]``/``self.dens[i]`` hold constraint rows;
    cost rows (reduced costs, with minus the objective value in the rhs cell)
    are kept in ``self.costs`` and pivoted together with the constraints.
    """

    # Degenerate-pivot run length that triggers the Bland fallback.  Any
    # positive constant preserves correctness; Bland alone cannot cycle, and
    # the counter resets whenever the objective strictly improves.
    STALL_LIMIT = 24

    def __init__(self, system: LinearSystem, objective: Sequence[Fraction] | None):
        self.n = system.cols
        m = len(system.matrix)
        self.flips = [1] * m
        self.rows: list[list[int]] = []
        self.dens: list[int] = []
        for i, (row, b) in enumerate(zip(system.matrix, system.rhs)):
            if b < 0:
                self.flips[i] = -1
                row = tuple(-x for x in row)
                b = -b
            art = [ZERO] * m
            art[i] = Fraction(1)
            nums, den = _scaled_row(list(row) + art + [b])
            self.rows.append(nums)
            self.dens.append(den)
        self.basis = [self.n + i for i in range(m)]

        width = self.n + m + 1
        common = 1
        for d in self.dens:
            common = common * d // math.gcd(common, d)
        acc = [0] * width
        for nums, den in zip(self.rows, self.dens):
            scale = common // den
            for j, a in enumerate(nums):
                if a:
                    acc[j] += a * scale
        phase1 = [-a for a in acc]
        for j in range(self.n, self.n + m):
            phase1[j] += common
        self.costs: list[list[int]] = [phase1]
        self.cost_dens: list[int] = [common]
        if objective is not None:
            nums, den = _scaled_row(list(objective) + [ZERO] * m + [ZERO])
            self.costs.append(nums)
            self.cost_dens.append(den)
        for idx in range(len(self.costs)):
            self.costs[idx], self.cost_dens[idx] = _reduce(self.costs[idx], self.cost_dens[idx])

        self.pivots = 0
        self.pivot_cap = math.comb(m + self.n + m, m)

    # -- elementary operations ---------------------------------------------

    def _pivot(self, prow: int, pcol: int) -> None:
        self.pivots += 1
        if self.pivots > self.pivot_cap:
            raise PivotLimitError(
                f"exceeded the anti-cycling pivot cap ({self.pivot_cap}); "
                "this indicates a solver bug"
            )
        nums = self.rows[prow]
        piv = nums[pcol]
        if piv < 0:
            nums = [-a for a in nums]
            piv = -piv
        nums, den = _reduce(nums, piv)
        self.rows[prow] = nums
        self.dens[prow] = den

        def update(other: list[int], other_den: int) -> tuple[list[int], int]:
            f = other[pcol]
            if not f:
                return other, other_den
            if den == 1:
                if f == 1:
                    new = [a - b for a, b in zip(other, nums)]
                elif f == -1:
                    new = [a + b for a, b in zip(other, nums)]
                else:
                    new = [a - f * b for a, b in zip(other, nums)]
                return _reduce(new, other_den)
            new = [a * den - f * b for a, b in zip(other, nums)]
            return _reduce(new, other_den * den)

        for i in range(len(self.rows)):
            if i != prow:
                self.rows[i], self.dens[i] = update(self.rows[i], self.dens[i])
        for i in range(len(self.costs)):
            self.costs[i], self.cost_dens[i] = update(self.costs[i], self.cost_dens[i])
        self.basis[prow] = pcol

    def _entering_bland(self, cost_idx: int, limit: int) -> int | None:
        """Bland: the lowest-index column (below ``limit``) with negative cost."""
        cost = self.costs[cost_idx]
        for j in range(limit):
            if cost[j] < 0:
                return j
        return None

    def _entering_dantzig(self, cost_idx: int, limit: int) -> int | None:
        """Most negative reduced cost, lowest index on ties.

        The cost row shares one denominator, so numerators compare directly.
        """
        cost = self.costs[cost_idx]
        best = None
        best_col = None
        for j in range(limit):
            c = cost[j]
            if c < 0 and (best is None or c < best):
                best, best_col = c, j
        return best_col

    def _leaving(self, col: int) -> int | None:
        """Ratio test on ``col``; ties resolved by least basic variable (Bland)."""
        best: tuple[int, int] | None = None  # (rhs_num, col_num) of best ratio
        best_row = -1
        for i, nums in enumerate(self.rows):
            a = nums[col]
            if a <= 0:
                continue
            b = nums[-1]
            if best is None:
                best, best_row = (b, a), i
                continue
            diff = b * best[1] - best[0] * a
            if diff < 0 or (diff == 0 and self.basis[i] < self.basis[best_row]):
                best, best_row = (b, a), i
        return None if best is None else best_row

    def _run(self, cost_idx: int, limit: int) -> bool:
        """Pivot to optimality of cost row ``cost_idx``; False if unbounded."""
        stalled = 0
        while True:
            if stalled < self.STALL_LIMIT:
                col = self._entering_dantzig(cost_idx, limit)
            else:
                col = self._entering_bland(cost_idx, limit)
            if col is None:
                return True
            row = self._leaving(col)
            if row is None:
                return False
            degenerate = self.rows[row][-1] == 0
            self._pivot(row, col)
            stalled = stalled + 1 if degenerate else 0

    # -- readouts -------------------------------------------------------------

    def objective_value(self, cost_idx: int) -> Fraction:
        return -Fraction(self.costs[cost_idx][-1], self.cost_dens[cost_idx])

    def structural_solution(self) -> tuple[Fraction, ...]:
        values = [ZERO] * self.n
        for i, var in enumerate(self.basis):
            if var < self.n:
                values[var] = Fraction(self.rows[i][-1], self.dens[i])
        return tuple(values)

    def farkas_certificate(self) -> tuple[Fraction, ...]:
        """Dual vector of the phase-1 optimum, unflipped to the original rows."""
        cost = self.costs[0]
        den = self.cost_dens[0]
        m = len(self.flips)
        return tuple(
            self.flips[i] * (1 - Fraction(cost[self.n + i], den)) for i in range(m)
        )

    def drop_artificials(self) -> None:
        """Pivot remaining artificials out of the basis; drop redundant rows."""
        i = 0
        while i < len(self.rows):
            if self.basis[i] < self.n:
                i += 1
                continue
            nums = self.rows[i]
            col = next((j for j in range(self.n) if nums[j]), None)
            if col is None:
                del self.rows[i], self.dens[i], self.basis[i]
            else:
                self._pivot(i, col)
                i += 1


def solve_feasibility(system: LinearSystem) -> FeasibilityResult:
    """Decide ``{M Q = P, Q >= 0}`` and return a solution or a certificate."""
    tableau = _Tableau(system, objective=None)
    tableau._run(0, tableau.n + len(system.matrix))
    if tableau.objective_value(0) == 0:
        return FeasibilityResult(
            FEASIBLE, tableau.structural_solution(), None, tableau.pivots
        )
    return FeasibilityResult(
        INFEASIBLE, None, tableau.farkas_certificate(), tableau.pivots
    )


def minimize(system: LinearSystem, objective: Sequence) -> OptimizationResult:
    """Minimize ``objective . Q`` over ``{M Q = P, Q >= 0}``, exactly.

    Returns the unique optimal value and one optimal vertex.  Raises
    :class:`InfeasibleError` (with a Farkas certificate attached) on an
    infeasible system and :class:`UnboundedError` when the objective is
    unbounded below.
    """
    objective = tuple(as_fraction(x) for x in objective)
    if len(objective) != system.cols:
        raise DimensionMismatchError(
            f"objective has {len(objective)} entries for {system.cols} columns"
        )
    tableau = _Tableau(system, objective)
    tableau._run(0, tableau.n + len(system.matrix))
    if tableau.objective_value(0) != 0:
        raise InfeasibleError(certificate=tableau.farkas_certificate())
    tableau.drop_artificials()
    if not tableau._run(1, tableau.n):
        raise UnboundedError("objective is unbounded below on the feasible region")
    return OptimizationResult(
        tableau.objective_value(1), tableau.structural_solution(), tableau.pivots
    )


def rational_rank(matrix: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    rows = [[as_fraction(x) for x in row] for row in matrix]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for col in range(cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        lead = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                factor = rows[i][col] / lead
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank
