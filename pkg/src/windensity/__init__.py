"""Exact windowed densities over window families.

Given a sequence of nonempty finite windows F = (F_n) with |F_n| -> ∞,
this library computes the normalized window counts
mu_n(A) = |A ∩ F_n| / |F_n| in exact rational arithmetic and builds the
structures they induce: the vanishing-density ideal
{A : mu_n(A) -> 0}, the supremum submeasure phi(A) = sup_n mu_n(A) with
its tail (exhaustion) trajectories, convergence of real sequences along
the ideal, constructive pseudo-unions, the block-union witness that
separates natural density from block density, and dyadic level
partitions with windowed block norms.

Limit-flavored quantities are never guessed: every answer is either
exact with a finite certificate or labeled with the horizon of evidence
that produced it.
"""

from .density import (
    DEFAULT_SCAN_CAP,
    PhiResult,
    Trajectory,
    TrendPolicy,
    Verdict,
    VerdictKind,
    decimal_str,
    exh_trajectory,
    frac_str,
    member_verdict,
    mu,
    mu_trajectory,
    phi,
    trajectory_csv,
    upper_density,
    verdict_record,
)
from .errors import (
    EvaluationRangeError,
    FamilyRangeError,
    FormatError,
    HorizonError,
    PseudoUnionError,
    ScanCapError,
    WindensityError,
)
from .families import (
    WindowFamily,
    classical_prefix,
    factorial_blocks,
    family_from_spec,
    family_union,
    from_file,
    parse_fam,
    union_of_windows,
)
from .idealops import (
    CharacteristicSequence,
    ConstantSequence,
    ConvergenceReport,
    FileSequence,
    PseudoUnionResult,
    RealSequence,
    ReciprocalSequence,
    WitnessReport,
    evaluate,
    exceedance_set,
    i_converges,
    parse_seq,
    pseudo_union,
    separating_witness,
)
from .partition import (
    BlockNormReport,
    Mode,
    PartitionReport,
    SliceInterval,
    VerifyResult,
    block_norm_report,
    build_partition,
    partition_csv,
    slice_interval,
    verify_partition,
)
from .sets import (
    EMPTY,
    ExplicitSet,
    GeneratorSet,
    IntegerSet,
    IntervalSet,
    Window,
    complement,
    contains,
    enumerate_up_to,
    explicit,
    format_iset,
    intersect_card,
    interval_union,
    is_finite,
    max_element,
    normalize_intervals,
    omega,
    parse_iset,
    restrict,
    set_difference,
    set_intersection,
    set_union,
    sets_equal,
    support_size,
    tail,
)

__version__ = "0.1.0"
