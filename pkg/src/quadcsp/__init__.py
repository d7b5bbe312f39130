"""Exact solver for conjunctions of constraints (xi - xj) - (xp - xq) <= m.

Variables range over the rationals; x0 is pinned to zero so single
variables, plain differences, sums and three-variable forms are all the
same shape with x0 in the unused slots.  The solver stores bounds in a
pair-indexed matrix, tightens it by iterated min-plus composition, and
checks its verdicts against independent positive-linear-dependence and
Fourier-Motzkin oracles.
"""

__version__ = "0.1.0"

from .core import (
    INF,
    Bound,
    Constraint4,
    NormalVector,
    ParseError,
    VarId,
    complement,
    format_bound,
    format_constraint,
    functional_value,
    make_constraint,
    normal_vector,
    parse_atomic,
    parse_constraints,
    satisfies,
)
from .matrix2d import (
    Matrix2D,
    from_dbm,
    from_json,
    load,
    new_matrix,
    to_constraints,
    to_json,
)
from .closure import (
    ClosureResult,
    Exactness,
    Subclass,
    classify,
    close,
    exactness_of,
    sweep_cap,
)
from .lindep import (
    HyperPath,
    NotSimpleError,
    SizeLimitError,
    WeightedFamily,
    cycle_weight,
    enumerate_simple_hcycles,
    is_simple,
    min_weight_bruteforce,
    positive_dependence,
    simple_hyperpaths,
    unique_coeffs,
)
from .fmoracle import (
    LinearSystem,
    ResourceLimitError,
    fm_feasible,
    fm_solution,
    fm_tight_bound,
)
from .solver import (
    SolveReport,
    extract_witness,
    is_bounded,
    reduce_domains,
    solve,
)

__all__ = [
    "INF",
    "Bound",
    "ClosureResult",
    "Constraint4",
    "Exactness",
    "HyperPath",
    "LinearSystem",
    "Matrix2D",
    "NormalVector",
    "NotSimpleError",
    "ParseError",
    "ResourceLimitError",
    "SizeLimitError",
    "SolveReport",
    "Subclass",
    "VarId",
    "WeightedFamily",
    "classify",
    "close",
    "complement",
    "cycle_weight",
    "enumerate_simple_hcycles",
    "exactness_of",
    "extract_witness",
    "fm_feasible",
    "fm_solution",
    "fm_tight_bound",
    "format_bound",
    "format_constraint",
    "from_dbm",
    "from_json",
    "functional_value",
    "is_bounded",
    "is_simple",
    "load",
    "make_constraint",
    "min_weight_bruteforce",
    "new_matrix",
    "normal_vector",
    "parse_atomic",
    "parse_constraints",
    "positive_dependence",
    "reduce_domains",
    "satisfies",
    "simple_hyperpaths",
    "solve",
    "sweep_cap",
    "to_constraints",
    "to_json",
    "unique_coeffs",
]
