"""qdctl: controllability analysis and pulse-level simulation for ladder
systems whose excited levels are two-fold degenerate.

The package decides complete controllability three ways — numerically (Lie
closure), algebraically (closed-form sufficient conditions), and
constructively (pulse optimization) — and simulates the fidelity cost of
switching off the degeneracy-splitting field with a finite relaxation time.
"""

from .backend import backend_name
from .criteria import (
    ConditionReport,
    EqualGapParameters,
    check_elim_gap_distinct,
    check_elim_no_crossing,
    check_elimination,
    check_lemma1,
    check_theorem1,
    check_theorem2,
    equal_gap_parameters,
)
from .dynamics import (
    FidelityCurve,
    PulseSchedule,
    StateVector,
    default_dt_max,
    evolve_piecewise,
    fidelity_exact,
    fidelity_perturbative,
    first_order_coefficients,
    optimize_pulse,
    sweep_tau,
)
from .errors import ContractError, InvalidSpecError, NumericError, ShapeMismatchError
from .hamiltonians import (
    HBAR_EV_S,
    J_PER_EV,
    SystemSpec,
    build_h0,
    build_he,
    build_hi,
    demo_spec,
    energy_gaps,
    from_json_dict,
    load_spec,
    save_spec,
    to_json_dict,
    traceless_part,
)
from .hilbert import (
    LevelIndex,
    OperatorMatrix,
    basis_dimension,
    commutator,
    degeneracy,
    flat_index,
    frobenius_inner,
    level_indices,
    make_h,
    make_x,
    make_y,
)
from .lie_closure import ClosureResult, close_algebra, is_completely_controllable

__version__ = "0.1.0"

__all__ = [
    "ClosureResult",
    "ConditionReport",
    "ContractError",
    "EqualGapParameters",
    "FidelityCurve",
    "HBAR_EV_S",
    "InvalidSpecError",
    "J_PER_EV",
    "LevelIndex",
    "NumericError",
    "OperatorMatrix",
    "PulseSchedule",
    "ShapeMismatchError",
    "StateVector",
    "SystemSpec",
    "backend_name",
    "basis_dimension",
    "build_h0",
    "build_he",
    "build_hi",
    "check_elim_gap_distinct",
    "check_elim_no_crossing",
    "check_elimination",
    "check_lemma1",
    "check_theorem1",
    "check_theorem2",
    "close_algebra",
    "commutator",
    "default_dt_max",
    "degeneracy",
    "demo_spec",
    "energy_gaps",
    "equal_gap_parameters",
    "evolve_piecewise",
    "fidelity_exact",
    "fidelity_perturbative",
    "first_order_coefficients",
    "flat_index",
    "frobenius_inner",
    "from_json_dict",
    "is_completely_controllable",
    "level_indices",
    "load_spec",
    "make_h",
    "make_x",
    "make_y",
    "optimize_pulse",
    "save_spec",
    "sweep_tau",
    "to_json_dict",
    "traceless_part",
]
