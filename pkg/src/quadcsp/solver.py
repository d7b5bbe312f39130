"""End-to-end pipeline: load, close, reduce domains, extract a witness.

Witness extraction follows the saturation argument behind the closure's
feasibility characterization: pin x1 to its current closed upper bound
(adding x1 <= hi and -x1 <= -hi), re-close, and move on to x2, so after
at most n rounds the solution set shrinks to a single valuation.  Where
the closure is exact every pin is attainable by construction; otherwise
the closed bound may overshoot the true supremum, so a pin can make the
system genuinely infeasible.  The closure detects this (its
contradictions are always real) and the pin falls back to the oracle's
exact supremum of that variable, which is attained, keeping the loop
sound on every input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .closure import ClosureResult, classify, close
from .core import INF, Bound, Constraint4, is_finite, satisfies
from .fmoracle import LinearSystem, fm_solution, fm_tight_bound
from .matrix2d import Matrix2D, load, to_constraints

Interval = tuple[Bound, Bound]


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve: verdict, closed matrix, boxes, witness.

    ``domains[i - 1]`` is the interval of xi; ``witness`` (when present)
    is a full valuation (nu_0..nu_n) with nu_0 = 0 satisfying every
    original constraint exactly.
    """

    feasible: bool
    closed: ClosureResult
    domains: tuple[Interval, ...] | None
    witness: tuple[Fraction, ...] | None


def reduce_domains(closed: Matrix2D) -> tuple[Interval, ...]:
    """Per-variable interval [-M(0,i,0,0), M(i,0,0,0)] for i = 1..n."""
    out = []
    for i in range(1, closed.n + 1):
        hi = closed.get(i, 0, 0, 0)
        neg_lo = closed.get(0, i, 0, 0)
        lo = -neg_lo if is_finite(neg_lo) else -INF
        out.append((lo, hi))
    return tuple(out)


def is_bounded(closed: Matrix2D) -> bool:
    """True when every variable interval has two finite ends."""
    return all(
        is_finite(lo) and is_finite(hi) for lo, hi in reduce_domains(closed)
    )


def _pin(
    m: Matrix2D, i: int, value: Fraction, max_sweeps: int | None
) -> ClosureResult:
    trial = m.copy()
    trial.set_min(i, 0, 0, 0, value)
    trial.set_min(0, i, 0, 0, -value)
    trial.normalize()
    return close(trial, max_sweeps=max_sweeps)


def _oracle_system(m: Matrix2D) -> LinearSystem:
    # The finite cells describe exactly the polyhedron of the original
    # constraints plus any pins applied so far.
    return LinearSystem.from_constraints(to_constraints(m), m.n)


def extract_witness(
    closed: Matrix2D,
    pin_unbounded_to_zero: bool = False,
    max_sweeps: int | None = None,
) -> tuple[Fraction, ...]:
    """A valuation satisfying every finite cell of a closed matrix.

    Requires a feasible matrix, and a bounded one unless
    ``pin_unbounded_to_zero`` is set, in which case each unbounded
    variable is first pinned to the point of its interval closest to 0
    (oracle-assisted when the closed interval overshoots).
    """
    if closed.has_negative_zero_cell():
        raise ValueError("cannot extract a witness from an infeasible matrix")
    m = closed.copy()

    if not is_bounded(m):
        if not pin_unbounded_to_zero:
            raise ValueError(
                "system is unbounded; enable pin_unbounded_to_zero to force"
            )
        while True:
            unbounded = [
                i
                for i, (lo, hi) in enumerate(reduce_domains(m), start=1)
                if not (is_finite(lo) and is_finite(hi))
            ]
            if not unbounded:
                break
            i = unbounded[0]
            lo, hi = reduce_domains(m)[i - 1]
            candidate = Fraction(max(lo, min(hi, Fraction(0))))
            trial = _pin(m, i, candidate, max_sweeps)
            if not trial.feasible:
                point = fm_solution(_oracle_system(m))
                assert point is not None
                trial = _pin(m, i, point[i], max_sweeps)
                assert trial.feasible
            m = trial.matrix

    values: list[Fraction] = [Fraction(0)]
    for i in range(1, m.n + 1):
        hi = m.get(i, 0, 0, 0)
        assert is_finite(hi)
        trial = _pin(m, i, hi, max_sweeps)
        if not trial.feasible:
            # approximation artifact: the closed bound is not attained
            objective = [0] * (m.n + 1)
            objective[i] = 1
            true_sup = fm_tight_bound(_oracle_system(m), objective)
            assert is_finite(true_sup)
            trial = _pin(m, i, true_sup, max_sweeps)
            assert trial.feasible
            hi = true_sup
        m = trial.matrix
        values.append(Fraction(hi))
    return tuple(values)


def solve(
    constraints: Sequence[Constraint4],
    n: int,
    witness_anyway: bool = False,
    max_sweeps: int | None = None,
) -> SolveReport:
    """Load, close, and when feasible reduce domains and extract a witness.

    Witnesses are produced for bounded systems (always) and unbounded
    ones only with ``witness_anyway``; every witness is verified against
    the original constraints by exact substitution before being returned.
    """
    matrix = load(constraints, n)
    closed = close(matrix, subclass=classify(constraints), max_sweeps=max_sweeps)
    if not closed.feasible:
        return SolveReport(
            feasible=False, closed=closed, domains=None, witness=None
        )
    domains = reduce_domains(closed.matrix)
    witness = None
    if is_bounded(closed.matrix) or witness_anyway:
        witness = extract_witness(
            closed.matrix,
            pin_unbounded_to_zero=witness_anyway,
            max_sweeps=max_sweeps,
        )
        bad = [c for c in constraints if not satisfies(c, witness)]
        if bad:
            raise RuntimeError(
                f"internal error: witness violates {bad[0]}"
            )
    return SolveReport(
        feasible=True, closed=closed, domains=domains, witness=witness
    )
