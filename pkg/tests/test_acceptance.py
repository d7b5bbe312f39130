"""Acceptance suite: one test per numbered criterion, zero tolerance.

Each test prints a single "ACCEPTANCE <k>: PASS/FAIL" line (visible with
pytest -s or in captured output).  Expected values are computed by
independent oracles: Fourier-Motzkin elimination for bounds and
feasibility, Floyd-Warshall for difference-bound systems, subset
enumeration for hypercycles.  Every comparison is exact over Fractions.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

from quadcsp.closure import Exactness, classify, close, sweep_cap
from quadcsp.core import normal_vector, parse_constraints, satisfies
from quadcsp.fmoracle import LinearSystem, fm_feasible, fm_tight_bound
from quadcsp.lindep import (
    cycle_weight,
    enumerate_simple_hcycles,
    is_simple,
    min_weight_bruteforce,
    positive_dependence,
    unique_coeffs,
)
from quadcsp.matrix2d import _class_table, from_dbm, load
from quadcsp.matrix2d import satisfies as matrix_satisfies
from quadcsp.solver import solve
from gen import (
    box_constraints,
    random_general_constraint,
    random_lower_bound_constraint,
    random_matrix,
    random_octagon_constraint,
    random_potential_dbm,
    random_upper_bound_constraint,
)
from oracles import floyd_warshall

SEVEN = """
x1 - x2 - x3 <= 3
x2 - x1 - x4 <= -4
x4 + x3 <= 5
x2 <= 3
x3 <= 1
x4 <= 5
x1 <= 6
"""

CYCLE_UNIT = "x1 - x2 - x3 <= 3\nx2 - x1 - x4 <= -4\nx4 + x3 <= 5"
CYCLE_DOUBLED = "x1 - x2 - x3 <= 3\nx1 + x2 - x3 <= -4\nx3 - x1 <= 5"


@contextmanager
def criterion(number: int, description: str):
    note = {"extra": ""}
    try:
        yield note
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL - {description}")
        raise
    extra = f" ({note['extra']})" if note["extra"] else ""
    print(f"ACCEPTANCE {number}: PASS - {description}{extra}")


def _finite_class_values(matrix):
    """(normal vector, value) per finite equivalence class, deduplicated."""
    out = []
    for vec, members in _class_table(matrix.n).classes:
        values = {matrix.cells[r][c] for r, c in members}
        assert len(values) == 1, "class cells must agree after closure"
        value = values.pop()
        if not isinstance(value, float):
            out.append((vec, value))
    return out


def test_criterion_1_reference_system_reproduction():
    with criterion(1, "reference system: feasible, valuation check, < 1 s"):
        start = time.perf_counter()
        cs, n = parse_constraints(SEVEN)
        result = close(load(cs, n), subclass=classify(cs))
        elapsed = time.perf_counter() - start
        assert result.feasible
        valuation = [Fraction(v) for v in (0, 6, 3, 1, 2)]
        assert matrix_satisfies(result.matrix, valuation)
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_criterion_2_hypercycle_arithmetic():
    with criterion(2, "hypercycle coefficients (1,1,1), (1,1,2), weight 4"):
        cs_a, n = parse_constraints(CYCLE_UNIT, n=4)
        vecs_a = [normal_vector(c, n) for c in cs_a]
        assert positive_dependence(vecs_a) == (1, 1, 1)

        cs_b, _ = parse_constraints(CYCLE_DOUBLED, n=4)
        vecs_b = [normal_vector(c, n) for c in cs_b]
        assert positive_dependence(vecs_b) == (1, 1, 2)

        cycles = enumerate_simple_hcycles(cs_a)
        assert len(cycles) == 1
        assert cycles[0].coeffs == (1, 1, 1)
        assert cycle_weight(cycles[0]) == 4


def test_criterion_3_dbm_degeneration():
    with criterion(3, "50 difference-bound systems match Floyd-Warshall") as note:
        rng = random.Random(303)
        mismatches = 0
        infeasible_seen = 0
        for k in range(50):
            n = k % 6 + 1
            dbm = random_potential_dbm(rng, n, density=0.5)
            result = close(from_dbm(dbm))
            dist, negative = floyd_warshall(dbm)
            if result.feasible != (not negative):
                mismatches += 1
                continue
            if negative:
                infeasible_seen += 1
                continue
            for a in range(n + 1):
                for b in range(n + 1):
                    got = result.matrix.get(b, a, 0, 0)
                    want = Fraction(0) if a == b else dist[a][b]
                    if got != want:
                        mismatches += 1
        assert mismatches == 0
        note["extra"] = f"{infeasible_seen} infeasible draws, verdicts agree"


def _exactness_run(rng, makers, count):
    """(instances checked, mismatch count, first mismatch description)."""
    mismatches = 0
    first = None
    instances = 0
    while instances < count:
        n = instances % 3 + 2
        maker = makers[instances % len(makers)]
        cs = [maker(rng, n) for _ in range(rng.randint(3, 10))]
        system = LinearSystem.from_constraints(cs, n)
        if not fm_feasible(system):
            continue
        result = close(load(cs, n), subclass=classify(cs))
        assert result.feasible
        for vec, value in _finite_class_values(result.matrix):
            want = fm_tight_bound(system, vec)
            assert value >= want, "closure fell below the oracle: unsound"
            if value != want:
                mismatches += 1
                if first is None:
                    first = (
                        f"cell {vec} = {value} but oracle says {want} "
                        f"for {[str(c) for c in cs]}"
                    )
                break
        instances += 1
    return instances, mismatches, first


def test_criterion_4_octagon_exactness():
    with criterion(4, "closure exact on 100 random octagon instances"):
        start = time.perf_counter()
        rng = random.Random(404)
        _, mismatches, first = _exactness_run(
            rng, [random_octagon_constraint], 100
        )
        elapsed = time.perf_counter() - start
        assert mismatches == 0, first
        assert elapsed < 300.0, f"took {elapsed:.1f}s"


def test_criterion_4_upper_lower_exactness():
    """Faithful to the stated criterion and expected to FAIL.

    The claim it validates is false: upper/lower-bound-form systems can
    have canonical bounds reachable only through combinations with
    coefficient 3 (e.g. (x1 + x2 <= a) + (2x2 - x1 <= b) gives
    3x2 <= a + b), while the closure laws compose pairwise and halve, so
    they reach a stationary point strictly above the true supremum on
    roughly a tenth of random instances.  The closure remains sound
    (never below the oracle, asserted here as well) and reports these
    classes as upper approximations.  Pinned counterexamples live in
    tests/test_closure.py; the analysis is in the decisions ledger.
    """
    with criterion(
        4, "closure exact on 100 random upper/lower-bound instances"
    ):
        start = time.perf_counter()
        rng = random.Random(405)
        count, mismatches, first = _exactness_run(
            rng,
            [random_upper_bound_constraint, random_lower_bound_constraint],
            100,
        )
        elapsed = time.perf_counter() - start
        assert elapsed < 300.0, f"took {elapsed:.1f}s"
        assert mismatches == 0, (
            f"{mismatches}/{count} instances have a closed cell strictly "
            f"above the oracle's supremum; first: {first}"
        )


def test_criterion_5_general_soundness():
    with criterion(5, "general instances: never below oracle, no false verdicts") as note:
        rng = random.Random(505)
        incomplete = 0
        infeasible_confirmed = 0
        for k in range(100):
            n = k % 3 + 2
            cs = [
                random_general_constraint(rng, n)
                for _ in range(rng.randint(2, 8))
            ]
            system = LinearSystem.from_constraints(cs, n)
            oracle_feasible = fm_feasible(system)
            result = close(load(cs, n), subclass=classify(cs))
            if not result.feasible:
                # closure contradictions must be real
                assert not oracle_feasible
                infeasible_confirmed += 1
                continue
            if not oracle_feasible:
                incomplete += 1
                continue
            for vec, value in _finite_class_values(result.matrix):
                assert value >= fm_tight_bound(system, vec)
        note["extra"] = (
            f"{infeasible_confirmed} infeasible confirmed, "
            f"{incomplete} approximation-induced incomplete verdicts"
        )


def _random_simple_family(rng):
    while True:
        r = rng.randint(2, 5)
        dim = rng.randint(2, 6)
        if r == 2:
            v = tuple(rng.randint(-2, 2) for _ in range(dim))
            if not any(v):
                continue
            family = [v, tuple(-x for x in v)]
        else:
            vectors = [
                tuple(rng.randint(-2, 2) for _ in range(dim))
                for _ in range(r - 1)
            ]
            lams = [rng.randint(1, 3) for _ in range(r - 1)]
            last = tuple(
                -sum(lam * vec[d] for lam, vec in zip(lams, vectors))
                for d in range(dim)
            )
            family = vectors + [last]
        if any(not any(v) for v in family):
            continue
        if len(set(family)) != len(family):
            continue
        if positive_dependence(family) is None:
            continue
        if not is_simple(family):
            continue
        return family


def test_criterion_6_unique_coefficients():
    with criterion(6, "unique coefficients invariant under permutation"):
        rng = random.Random(606)
        for _ in range(50):
            family = _random_simple_family(rng)
            base = unique_coeffs(family)
            for _ in range(4):
                perm = list(range(len(family)))
                rng.shuffle(perm)
                shuffled = [family[k] for k in perm]
                got = unique_coeffs(shuffled)
                assert got == tuple(base[k] for k in perm)


def test_criterion_7_feasibility_cross_check():
    with criterion(7, "negative min-weight cycles coincide with infeasibility") as note:
        rng = random.Random(707)
        infeasible_seen = 0
        for k in range(50):
            n = 2 if k < 40 else 3
            extra = rng.randint(1, 3) if n == 2 else 2
            cs = [
                random_general_constraint(rng, n, lo=-5, hi=7)
                for _ in range(extra)
            ] + box_constraints(n, rng.randint(4, 9))
            cs = list(dict.fromkeys(cs))
            cap = len(cs)
            min_bounds = {
                c: min(
                    c.m,
                    min_weight_bruteforce(c, cs, max_size=cap, max_constraints=cap),
                )
                for c in cs
            }
            cycles = enumerate_simple_hcycles(cs, max_size=cap, max_constraints=cap)
            all_nonneg = all(cycle_weight(f, min_bounds) >= 0 for f in cycles)
            feasible = fm_feasible(LinearSystem.from_constraints(cs, n))
            assert all_nonneg == feasible
            infeasible_seen += not feasible
        assert infeasible_seen >= 3
        note["extra"] = f"{infeasible_seen} infeasible draws"


def test_criterion_8_closure_properties():
    with criterion(8, "idempotence, monotonicity, sweep cap, n=6 smoke") as note:
        rng = random.Random(808)
        for _ in range(200):
            n = rng.randint(1, 3)
            matrix = random_matrix(rng, n)
            first = close(matrix)
            assert first.sweeps_used <= sweep_cap(n)
            size = len(matrix.cells)
            for r in range(size):
                for c in range(size):
                    assert first.matrix.cells[r][c] <= matrix.cells[r][c]
            second = close(first.matrix)
            assert second.matrix == first.matrix
            assert second.sweeps_used == (1 if first.feasible else 0)

        smoke = [random_general_constraint(rng, 6, lo=-3, hi=12) for _ in range(12)]
        start = time.perf_counter()
        result = close(load(smoke, 6), subclass=classify(smoke))
        elapsed = time.perf_counter() - start
        assert result.sweeps_used <= sweep_cap(6)
        assert elapsed < 60.0, f"n=6 closure took {elapsed:.1f}s"
        note["extra"] = f"n=6 smoke {elapsed:.1f}s, {result.sweeps_used} sweeps"


def test_criterion_9_witness_soundness():
    with criterion(9, "100 extracted witnesses satisfy all constraints exactly"):
        rng = random.Random(909)
        produced = 0
        while produced < 100:
            n = produced % 3 + 1
            cs = [
                random_general_constraint(rng, n, lo=-4, hi=10)
                for _ in range(rng.randint(0, 4))
            ] + box_constraints(n, rng.randint(5, 15))
            report = solve(cs, n)
            if not report.feasible:
                continue
            assert report.witness is not None
            assert report.witness[0] == 0
            for c in cs:
                assert satisfies(c, report.witness)
            produced += 1
