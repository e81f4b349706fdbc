"""Integer complexity, defects and low-defect polynomial covers."""

from .complexity import (
    ComplexityTable,
    E_from_table,
    build_table,
    complexity,
    good_addition_splits,
    good_factorizations,
    load_table,
    oracle_complexity,
    selfridge_E,
    table_from_bytes,
)
from .cover import CoverReport, CoverSet, build_S_k_alpha, build_S_r, compute_T_alpha, verify_cover
from .defect import (
    Cmp,
    DefectKey,
    DefectThreshold,
    StabilityStatus,
    Verdict,
    compare_defects,
    defect_class,
    defect_key,
    enumerate_A_r,
    enumerate_B_r,
    is_leader,
    sorted_defects,
    stability,
    stability_verdicts,
    stable_complexity,
    stable_defect_key,
)
from .errors import ArgumentError, DefectForgeError, RangeError, ValidationError
from .ldp import Const, Extend, LowDefectPair, Product, evaluate, find_3_representations, is_efficiently_represented
from .ordinal import OrdinalCNF, nat_prod, nat_sum

__version__ = "0.1.0"
