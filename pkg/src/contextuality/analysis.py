"""Contextuality analysis: constraint systems, verdicts, and the TV measure.

A *hidden outcome* is one complete assignment of value indices to every
filled cell of a system.  A joint distribution over hidden outcomes couples
all bunches at once; the system is noncontextual exactly when some such
distribution reproduces every bunch and places the coincidence-maximizing
mass on every connection's constant tuples.  That existence question is the
feasibility of ``M Q = P`` with ``Q >= 0``, built here row by row:

* one row per (context, bunch value): indicator of the outcomes restricting
  to that value, with the bunch probability on the right-hand side;
* one row per (content, value ``l``): indicator of the outcomes constant
  ``l`` on that connection, with the diagonal coupling mass on the right.

Column order is lexicographic over the canonical cell order (contexts sorted
by label, contents sorted within a context), value index ascending, first
cell most significant.

Dropping nonnegativity, real-valued solutions always exist; minimizing their
total variation ``sum |Q|`` (via the split ``Q = Q1 - Q2``) yields the
contextuality measure ``TV - 1``, zero exactly on noncontextual systems.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .coupling import MAXIMAL_COUPLING, CouplingRule
from .distribution import ONE, ZERO, Distribution, as_fraction
from .errors import DimensionMismatchError, OutcomeSpaceTooLargeError, SolverError
from .simplex import LinearSystem, OptimizationResult, minimize, solve_feasibility
from .systems import CCSystem

DEFAULT_COLUMN_CAP = 1 << 20


@dataclass(frozen=True)
class OutcomeSpace:
    """Canonically ordered hidden-outcome space of a system.

    Cells are (context, content) pairs in canonical order; outcome index is
    lexicographic with the first cell most significant.
    """

    cells: tuple[tuple[str, str], ...]
    sizes: tuple[int, ...]

    @property
    def size(self) -> int:
        n = 1
        for k in self.sizes:
            n *= k
        return n

    @property
    def strides(self) -> tuple[int, ...]:
        strides = [1] * len(self.sizes)
        for i in range(len(self.sizes) - 2, -1, -1):
            strides[i] = strides[i + 1] * self.sizes[i + 1]
        return tuple(strides)

    def outcomes(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(k) for k in self.sizes))

    def index(self, outcome: Sequence[int]) -> int:
        return sum(v * s for v, s in zip(outcome, self.strides))

    def indicator_row(self, fixed: Mapping[int, int]) -> list[int]:
        """0/1 row marking every outcome that agrees with ``fixed`` (cell pos -> value)."""
        row = [0] * self.size
        strides = self.strides
        base = sum(strides[pos] * value for pos, value in fixed.items())
        free = [pos for pos in range(len(self.sizes)) if pos not in fixed]
        for combo in itertools.product(*(range(self.sizes[pos]) for pos in free)):
            row[base + sum(strides[pos] * v for pos, v in zip(free, combo))] = 1
        return row

    def cell_position(self, context: str, content: str) -> int:
        return self.cells.index((context, content))


def outcome_space(system: CCSystem, max_columns: int = DEFAULT_COLUMN_CAP) -> OutcomeSpace:
    """The system's hidden-outcome space, guarded by the column cap."""
    cells = system.cells_in_order()
    sizes = tuple(system.content(q).size for _, q in cells)
    space = OutcomeSpace(cells, sizes)
    if space.size > max_columns:
        raise OutcomeSpaceTooLargeError(
            f"hidden-outcome space has {space.size} columns, cap is {max_columns}; "
            "raise max_columns to proceed"
        )
    return space


def _value_tuples(sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(range(k) for k in sizes))


def _connection_marginals(system: CCSystem, content: str) -> list[Distribution]:
    connection = next(c for c in system.connections() if c.content == content)
    return [system.variable_marginal(ctx, content) for ctx, _ in connection.members]


def build_associated_system(
    system: CCSystem,
    max_columns: int = DEFAULT_COLUMN_CAP,
    rule: CouplingRule = MAXIMAL_COUPLING,
) -> LinearSystem:
    """The Boolean system ``M Q = P`` whose nonnegative solvability is noncontextuality."""
    space = outcome_space(system, max_columns)
    rows: list[tuple[int, ...]] = []
    rhs: list[Fraction] = []
    for context in system.contexts:
        contents = system.context_contents(context)
        positions = [space.cell_position(context, q) for q in contents]
        bunch = system.bunches[context]
        for value in _value_tuples(bunch.alphabet_sizes):
            rows.append(tuple(space.indicator_row(dict(zip(positions, value)))))
            rhs.append(bunch.mass(value))
    for content in system.contents:
        connection = next(c for c in system.connections() if c.content == content.label)
        positions = [space.cell_position(ctx, content.label) for ctx, _ in connection.members]
        diagonal = rule.diagonal_masses(_connection_marginals(system, content.label))
        for l in range(content.size):
            rows.append(tuple(space.indicator_row({pos: l for pos in positions})))
            rhs.append(diagonal[l])
    return LinearSystem(tuple(rows), tuple(rhs), tuple(space.outcomes()))


@dataclass(frozen=True)
class Verdict:
    """Contextuality decision with its supporting witness.

    Noncontextual systems carry a coupling: a distribution over hidden
    outcomes whose bunch marginals and connection constant-tuple masses
    reproduce the constraint data exactly.  Contextual systems carry a
    Farkas certificate over the rows of the associated system.
    """

    contextual: bool
    coupling: Distribution | None
    certificate: tuple[Fraction, ...] | None
    pivots: int = 0


def decide_contextuality(
    system: CCSystem,
    max_columns: int = DEFAULT_COLUMN_CAP,
    rule: CouplingRule = MAXIMAL_COUPLING,
) -> Verdict:
    """Decide contextuality by exact feasibility of the associated system."""
    linear = build_associated_system(system, max_columns, rule)
    result = solve_feasibility(linear)
    if result.feasible:
        space = outcome_space(system, max_columns)
        masses = {
            outcome: mass
            for outcome, mass in zip(space.outcomes(), result.solution)
            if mass
        }
        coupling = Distribution(space.sizes, masses)
        return Verdict(False, coupling, None, result.pivots)
    return Verdict(True, None, result.certificate, result.pivots)


def build_expanded_system(
    system: CCSystem,
    completions: Mapping[str, Distribution] | None = None,
    max_columns: int = DEFAULT_COLUMN_CAP,
    rule: CouplingRule = MAXIMAL_COUPLING,
) -> LinearSystem:
    """The full-row-rank system ``M* Q = P*`` that always has a real solution.

    Three blocks: a leading all-ones row with right-hand side 1; for every
    bunch, all r-marginal probabilities (r = 1 up to the bunch arity) over
    value indices below each content's top index (the top value's rows are
    linear combinations of the rest, so they are omitted); and for every
    connection of size >= 2, the same for the r-marginals (r >= 2) of its
    full coupling.  ``completions`` overrides the per-connection couplings;
    by default they come from ``rule``.
    """
    space = outcome_space(system, max_columns)
    if completions is None:
        completions = {
            content.label: rule.full_coupling(_connection_marginals(system, content.label))
            for content in system.contents
        }
    rows: list[tuple[int, ...]] = [(1,) * space.size]
    rhs: list[Fraction] = [ONE]

    max_bunch_arity = max(len(system.context_contents(c)) for c in system.contexts)
    for r in range(1, max_bunch_arity + 1):
        for context in system.contexts:
            contents = system.context_contents(context)
            if len(contents) < r:
                continue
            bunch = system.bunches[context]
            for subset in itertools.combinations(range(len(contents)), r):
                reduced = [system.content(contents[i]).size - 1 for i in subset]
                if any(k == 0 for k in reduced):
                    continue
                sub_marginal = bunch.marginal(subset)
                positions = [space.cell_position(context, contents[i]) for i in subset]
                for value in _value_tuples(reduced):
                    rows.append(tuple(space.indicator_row(dict(zip(positions, value)))))
                    rhs.append(sub_marginal.mass(value))

    connections = {c.content: c for c in system.connections()}
    max_connection_size = max(c.size for c in connections.values())
    for r in range(2, max_connection_size + 1):
        for content in system.contents:
            connection = connections[content.label]
            if connection.size < r or content.size == 1:
                continue
            coupling = completions[content.label]
            if coupling.arity != connection.size or coupling.alphabet_sizes != (
                content.size,
            ) * connection.size:
                raise DimensionMismatchError(
                    f"completion for {content.label!r} has shape "
                    f"{coupling.alphabet_sizes}, expected "
                    f"{(content.size,) * connection.size}"
                )
            members = [ctx for ctx, _ in connection.members]
            for subset in itertools.combinations(range(connection.size), r):
                sub_marginal = coupling.marginal(subset)
                positions = [space.cell_position(members[i], content.label) for i in subset]
                for value in _value_tuples([content.size - 1] * r):
                    rows.append(tuple(space.indicator_row(dict(zip(positions, value)))))
                    rhs.append(sub_marginal.mass(value))
    return LinearSystem(tuple(rows), tuple(rhs), tuple(space.outcomes()))


@dataclass(frozen=True)
class QuasiCoupling:
    """Signed rational masses over hidden outcomes, summing to 1.

    ``total_variation`` is the sum of absolute masses (1 for a proper
    coupling, larger otherwise).  Construction computes it; validity against
    a system is established by :func:`verify_quasi_coupling`.
    """

    masses: dict[tuple[int, ...], Fraction]
    total_variation: Fraction = field(init=False)

    def __post_init__(self):
        clean = {tuple(k): as_fraction(v) for k, v in self.masses.items() if v}
        object.__setattr__(self, "masses", clean)
        object.__setattr__(self, "total_variation", sum((abs(v) for v in clean.values()), ZERO))

    @property
    def total_mass(self) -> Fraction:
        return sum(self.masses.values(), ZERO)


@dataclass(frozen=True)
class MeasureResult:
    """Minimum total variation over constraint-satisfying quasi-couplings."""

    total_variation: Fraction
    measure: Fraction
    witness: QuasiCoupling
    pivots: int = 0


def contextuality_measure(
    system: CCSystem,
    max_columns: int = DEFAULT_COLUMN_CAP,
    rule: CouplingRule = MAXIMAL_COUPLING,
) -> MeasureResult:
    """Minimize ``sum |Q|`` subject to ``M Q = P`` and report ``TV - 1``.

    The nonlinear objective is linearized by splitting ``Q = Q1 - Q2`` with
    both halves nonnegative and minimizing ``sum Q2`` over the widened system
    ``(M | -M)``; at the optimum the halves never overlap, so
    ``TV = 1 + 2 sum Q2``, an identity asserted against the reconstructed
    signed masses.
    """
    linear = build_associated_system(system, max_columns, rule)
    space = outcome_space(system, max_columns)
    n = space.size
    wide_rows = tuple(row + tuple(-x for x in row) for row in linear.matrix)
    labels = tuple(("+", o) for o in space.outcomes()) + tuple(
        ("-", o) for o in space.outcomes()
    )
    wide = LinearSystem(wide_rows, linear.rhs, labels)
    objective = (ZERO,) * n + (ONE,) * n
    result: OptimizationResult = minimize(wide, objective)
    outcomes = list(space.outcomes())
    masses: dict[tuple[int, ...], Fraction] = {}
    for i, outcome in enumerate(outcomes):
        gamma = result.solution[i] - result.solution[n + i]
        if gamma:
            masses[outcome] = gamma
    witness = QuasiCoupling(masses)
    if witness.total_variation != ONE + 2 * result.value:
        raise SolverError(
            "internal inconsistency: total variation "
            f"{witness.total_variation} != 1 + 2*{result.value}"
        )
    return MeasureResult(
        witness.total_variation, witness.total_variation - ONE, witness, result.pivots
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    violations: tuple[str, ...] = ()


@dataclass(frozen=True)
class QuasiCouplingReport:
    checks: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)


def verify_quasi_coupling(
    system: CCSystem,
    quasi: QuasiCoupling | Mapping[tuple[int, ...], Fraction],
    max_columns: int = DEFAULT_COLUMN_CAP,
    rule: CouplingRule = MAXIMAL_COUPLING,
) -> QuasiCouplingReport:
    """Check a signed mass assignment against a system's constraints, exactly.

    Three checks: the masses sum to 1; every bunch equation holds; every
    connection constant-tuple equation holds.  Violations are reported per
    equation.
    """
    if isinstance(quasi, QuasiCoupling):
        masses = quasi.masses
    else:
        masses = {key: as_fraction(v) for key, v in dict(quasi).items()}
    space = outcome_space(system, max_columns)
    width = len(space.cells)
    for outcome in masses:
        if len(outcome) != width or any(
            not 0 <= v < k for v, k in zip(outcome, space.sizes)
        ):
            raise DimensionMismatchError(
                f"outcome {outcome} does not index this system's {width}-cell space"
            )

    total = sum(masses.values(), ZERO)
    checks = [
        CheckResult(
            "total_mass",
            total == ONE,
            () if total == ONE else (f"masses sum to {total}, expected 1",),
        )
    ]

    def restricted_sum(fixed: Mapping[int, int]) -> Fraction:
        acc = ZERO
        for outcome, mass in masses.items():
            if all(outcome[pos] == value for pos, value in fixed.items()):
                acc += mass
        return acc

    bunch_violations = []
    for context in system.contexts:
        contents = system.context_contents(context)
        positions = [space.cell_position(context, q) for q in contents]
        bunch = system.bunches[context]
        for value in _value_tuples(bunch.alphabet_sizes):
            got = restricted_sum(dict(zip(positions, value)))
            want = bunch.mass(value)
            if got != want:
                bunch_violations.append(
                    f"bunch {context!r} at {value}: {got} != {want}"
                )
    checks.append(CheckResult("bunch_marginals", not bunch_violations, tuple(bunch_violations)))

    connection_violations = []
    for content in system.contents:
        connection = next(c for c in system.connections() if c.content == content.label)
        positions = [space.cell_position(ctx, content.label) for ctx, _ in connection.members]
        diagonal = rule.diagonal_masses(_connection_marginals(system, content.label))
        for l in range(content.size):
            got = restricted_sum({pos: l for pos in positions})
            if got != diagonal[l]:
                connection_violations.append(
                    f"connection {content.label!r} at value {l}: {got} != {diagonal[l]}"
                )
    checks.append(
        CheckResult("connection_diagonals", not connection_violations, tuple(connection_violations))
    )
    return QuasiCouplingReport(tuple(checks))
