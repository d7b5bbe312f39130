"""Iterated tightening of a 2D bound matrix to (an approximation of) its
canonical form.

Each sweep visits every cell (i,j,p,q) and every intermediate pair (k,l),
applying the two composition laws

    M[i,j,p,q] <= M[i,j,k,l] + M[k,l,p,q]
    M[i,j,p,q] <= M[i,k,l,q] + M[k,j,p,l]

followed by coherence normalization (class equality and doubled-cell
coupling).  Sweeps repeat until nothing changes, capped at
ceil((n+1)^4 / 2).  A zero-normal-vector cell dropping below zero is a
derived contradiction "0 <= negative": the verdict turns infeasible and
the run stops at the end of that sweep.

Every update derives a valid consequence of the input constraints, so the
result never under-approximates the true tightest bounds.  On octagon
inputs the fixpoint is exactly the canonical form; otherwise it is an
upper approximation (see exactness_of for why the three-variable shapes
are not exact).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .core import Constraint4
from .matrix2d import Matrix2D


class Subclass(Enum):
    """Syntactic shape of a constraint set, deciding closure exactness."""

    OCTAGON = "Octagon"
    UPPER_BOUND = "UpperBound"
    LOWER_BOUND = "LowerBound"
    GENERAL = "General"


class Exactness(Enum):
    EXACT = "Exact"
    UPPER_APPROX = "UpperApprox"


@dataclass(frozen=True)
class ClosureResult:
    matrix: Matrix2D
    feasible: bool
    sweeps_used: int
    exactness: Exactness


def sweep_cap(n: int) -> int:
    """Hard iteration backstop: ceil((n+1)^4 / 2)."""
    return ((n + 1) ** 4 + 1) // 2


def classify(constraints: Iterable[Constraint4]) -> Subclass:
    """Syntactic subclass of a canonical constraint list.

    Octagon: at most two nonzero occurrences per constraint
    (+-xi +-xj <= k).  UpperBound: q = 0 throughout (xi - xj <= xp + k).
    LowerBound: p = 0 throughout (xp <= xi - xj + k).  Anything else is
    General.
    """
    cs = list(constraints)
    if all(sum(1 for v in c.indices() if v) <= 2 for c in cs):
        return Subclass.OCTAGON
    if all(c.q == 0 for c in cs):
        return Subclass.UPPER_BOUND
    if all(c.p == 0 for c in cs):
        return Subclass.LOWER_BOUND
    return Subclass.GENERAL


def exactness_of(sub: Subclass) -> Exactness:
    """Whether the closure reaches the true canonical form on a subclass.

    Only Octagon inputs are guaranteed exact.  The three-variable
    UpperBound/LowerBound shapes admit systems whose tightest bounds
    need combinations with coefficient 3 (e.g. adding x1 + x2 <= a to
    2x2 - x1 <= b gives 3x2 <= a + b), which no sequence of pairwise
    compositions and halvings reaches: the closure is then stationary
    strictly above the canonical form, so those classes are honestly
    reported as upper approximations.
    """
    if sub is Subclass.OCTAGON:
        return Exactness.EXACT
    return Exactness.UPPER_APPROX


def _sweep(cells: list[list], n: int, trace: dict | None = None) -> bool:
    """One full pass of both composition laws, in place.

    Row-major over cells, intermediates in index order; updated values
    are used immediately (the fixpoint is order-independent, the order
    only makes sweep counts reproducible).  With ``trace`` given, each
    changed cell maps to its winning term ("sum", cell_a, cell_b).
    """
    np1 = n + 1
    size = np1 * np1
    div = [s // np1 for s in range(size)]
    mod = [s % np1 for s in range(size)]
    base = [k * np1 for k in range(np1)]
    changed = False
    for r in range(size):
        p, q = div[r], mod[r]
        row_r = cells[r]
        rows_lq = [cells[base[l] + q] for l in range(np1)]
        rows_pl = [cells[base[p] + l] for l in range(np1)]
        for c in range(size):
            i, j = div[c], mod[c]
            ibase = base[i]
            original = row_r[c]
            best = original
            term = None
            for s in range(size):
                a = cells[s][c]
                if type(a) is not float:
                    b = row_r[s]
                    if type(b) is not float:
                        cand = a + b
                        if cand < best:
                            best = cand
                            term = ("sum", (s, c), (r, s))
                k, l = div[s], mod[s]
                a = rows_lq[l][ibase + k]
                if type(a) is not float:
                    b = rows_pl[l][base[k] + j]
                    if type(b) is not float:
                        cand = a + b
                        if cand < best:
                            best = cand
                            term = (
                                "sum",
                                (base[l] + q, ibase + k),
                                (base[p] + l, base[k] + j),
                            )
            if best < original:
                row_r[c] = best
                changed = True
                if trace is not None:
                    trace[(r, c)] = term
    return changed


# The plain iteration need not reach its own fixpoint in finitely many
# sweeps: compositions and halvings keep every derived value dyadic in
# the input denominators, while the limit can require others (a gain-1/2
# feedback loop converges to values like -1/3 geometrically).  When the
# set of still-changing cells settles into a pattern, the sweep's winning
# terms form an affine policy x = Ax + b; its exact fixpoint is a valid
# jump target (each policy iterate dominates the true iterate, so the
# policy fixpoint dominates the true limit), and a stationary matrix
# reached from above through such jumps *is* the true limit, because the
# greatest fixpoint below the starting matrix bounds every sound
# stationary point from above.  The jump is attempted sparingly and
# verified by the next sweep; the cap still backstops everything.

_ACCEL_START = 8
_ACCEL_EVERY = 4
_ACCEL_MAX_VARS = 1200


def _term_parts(term) -> list[tuple[tuple[int, int], Fraction]]:
    kind = term[0]
    if kind == "sum":
        return [(term[1], Fraction(1)), (term[2], Fraction(1))]
    if kind == "copy":
        return [(term[1], Fraction(1))]
    if kind == "half":
        return [(term[1], Fraction(1, 2))]
    return [(term[1], Fraction(2))]  # double


def _gauss_solve(a: list[list[Fraction]], b: list[Fraction]):
    """Unique exact solution of a x = b, or None when singular."""
    m = len(a)
    aug = [row[:] + [b[k]] for k, row in enumerate(a)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col]
        aug[col] = [v / inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [aug[k][m] for k in range(m)]


def _policy_fixpoint(eqs: dict, cells: list[list]):
    """Exact fixpoint of a recorded affine policy, or None.

    Variables determined acyclically from frozen cells are peeled off by
    substitution; the remainder is solved densely.  Rejected unless
    provably contracting and dominated by the current values: within the
    remainder no doubling edge and no cycle among gain-1 edges, a unique
    linear solution, and every component <= its current cell (jumps must
    remain valid upper bounds).
    """
    parts: dict = {}
    consts: dict = {}
    for cell, term in eqs.items():
        ps = []
        const = Fraction(0)
        for arg, gain in _term_parts(term):
            if arg in eqs:
                ps.append((arg, gain))
            else:
                frozen = cells[arg[0]][arg[1]]
                if isinstance(frozen, float):
                    return None
                const += gain * frozen
        parts[cell] = ps
        consts[cell] = const

    # substitution pass: resolve cells with no unresolved arguments
    resolved: dict = {}
    deps = {cell: {arg for arg, _ in ps} for cell, ps in parts.items()}
    users: dict = {}
    for cell, ds in deps.items():
        for d in ds:
            users.setdefault(d, set()).add(cell)
    ready = [cell for cell, ds in deps.items() if not ds]
    while ready:
        cell = ready.pop()
        resolved[cell] = consts[cell] + sum(
            (g * resolved[a] for a, g in parts[cell]), Fraction(0)
        )
        for user in users.get(cell, ()):
            ds = deps[user]
            ds.discard(cell)
            if not ds and user not in resolved:
                ready.append(user)

    core = [cell for cell in eqs if cell not in resolved]
    if core:
        if len(core) > _ACCEL_MAX_VARS:
            return None
        index = {cell: k for k, cell in enumerate(core)}
        m = len(core)
        unit_adj: list[list[int]] = [[] for _ in range(m)]
        for cell in core:
            k = index[cell]
            for arg, gain in parts[cell]:
                a = index.get(arg)
                if a is None:
                    continue
                if gain > 1:
                    return None
                if gain == 1:
                    unit_adj[k].append(a)
        state = [0] * m  # 0 new, 1 on stack, 2 done
        for start in range(m):
            if state[start]:
                continue
            stack = [(start, iter(unit_adj[start]))]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if state[nxt] == 1:
                        return None  # gain-1 cycle: not a contraction
                    if state[nxt] == 0:
                        state[nxt] = 1
                        stack.append((nxt, iter(unit_adj[nxt])))
                        advanced = True
                        break
                if not advanced:
                    state[node] = 2
                    stack.pop()
        a_mat = [[Fraction(0)] * m for _ in range(m)]
        b_vec = [Fraction(0)] * m
        for cell in core:
            k = index[cell]
            a_mat[k][k] += Fraction(1)
            b_vec[k] = consts[cell]
            for arg, gain in parts[cell]:
                a = index.get(arg)
                if a is None:
                    b_vec[k] += gain * resolved[arg]
                else:
                    a_mat[k][a] -= gain
        solution = _gauss_solve(a_mat, b_vec)
        if solution is None:
            return None
        for cell, k in index.items():
            resolved[cell] = solution[k]

    for cell, value in resolved.items():
        if value > cells[cell[0]][cell[1]]:
            return None
    return resolved


def close(
    matrix: Matrix2D,
    subclass: Subclass | None = None,
    max_sweeps: int | None = None,
) -> ClosureResult:
    """Tighten a copy of ``matrix`` to stationarity (or the sweep cap).

    ``subclass`` is the classification of the constraints the matrix was
    loaded from; without it the result is conservatively tagged as an
    upper approximation (the normalized matrix alone no longer determines
    the original syntactic shape).  ``max_sweeps`` overrides the default
    cap.

    An input whose zero-vector class is already negative returns
    immediately (sweeps_used = 0), which keeps close idempotent on its
    own outputs despite the early exit on infeasibility.
    """
    m = matrix.copy()
    m._normalize()
    if m.has_negative_zero_cell():
        return ClosureResult(
            matrix=m,
            feasible=False,
            sweeps_used=0,
            exactness=Exactness.UPPER_APPROX,
        )
    cap = sweep_cap(m.n) if max_sweeps is None else max_sweeps
    sweeps = 0
    stationary = False
    feasible = True
    recent: dict = {}
    while sweeps < cap:
        sweeps += 1
        trace: dict = {}
        changed = _sweep(m.cells, m.n, trace)
        changed = m._normalize(trace) or changed
        if m.has_negative_zero_cell():
            feasible = False
            break
        if not changed:
            stationary = True
            break
        for cell, term in trace.items():
            recent[cell] = (sweeps, term)
        if sweeps >= _ACCEL_START and sweeps % _ACCEL_EVERY == 0:
            eqs = {
                cell: term
                for cell, (step, term) in recent.items()
                if step > sweeps - 2
            }
            if eqs:
                jump = _policy_fixpoint(eqs, m.cells)
                if jump:
                    for (r, c), value in jump.items():
                        if value < m.cells[r][c]:
                            m.cells[r][c] = value
                    m._normalize()
                    if m.has_negative_zero_cell():
                        feasible = False
                        break
    exact = (
        feasible
        and stationary
        and subclass is not None
        and exactness_of(subclass) is Exactness.EXACT
    )
    return ClosureResult(
        matrix=m,
        feasible=feasible,
        sweeps_used=sweeps,
        exactness=Exactness.EXACT if exact else Exactness.UPPER_APPROX,
    )
