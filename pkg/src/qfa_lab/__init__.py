"""qfa-lab: simulator, validator, and operation algebra for two-way quantum
finite automata with measure-each-step acceptance semantics."""

from .core import (
    ENDMARKERS,
    LEFT_END,
    RIGHT_END,
    AlphabetError,
    MachineSpec,
    NotDirectionPartitioned,
    QfaError,
    ValidationError,
    VdForm,
    from_vd_form,
    parse_input,
    root_of_unity,
    to_vd_form,
)
from .wellformed import (
    CapExceeded,
    CompletionError,
    ValidationReport,
    check_global_unitarity,
    check_wellformed,
    complete_machine,
    complete_unitary,
    halts_at_left_end,
    halts_at_right_end,
    is_non_circular,
    is_non_recurrent,
    unitarity_deviation,
)
from .engine import (
    EvolutionOperator,
    RecognitionReport,
    RuntimeProfile,
    SimulationResult,
    build_evolution,
    expected_runtime_profile,
    recognizes,
    simulate,
    simulate_oracle,
)
from .ops import ConstructionAudit, SideConditionError, catenate, complement, intersect, reverse, union
from .classical import Dfa, brute_membership, dfa_run, dfa_to_2rfa, is_2rfa, minimize_dfa
from .metrics import BoundReport, check_operation_bounds, check_prop3, qsc_witness

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
