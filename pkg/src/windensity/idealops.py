"""Ideal-level constructions on top of the density engine.

* ``exceedance_set`` unfolds "x_k is within ε of L along the ideal" into
  the index set {k : |x_k − L| >= ε}; closed-form sequences get exact,
  possibly infinite, exceedance structure;
* ``i_converges`` classifies convergence of a real sequence along a
  family's vanishing ideal, one verdict per ε with the weakest verdict
  dominating;
* ``pseudo_union`` builds a single set almost-containing finitely many
  ideal members (the constructive face of σ-directedness mod finite);
* ``separating_witness`` produces the union-of-blocks set that has
  natural density zero yet full density along the factorial-blocks
  family, together with the exact evidence for both claims.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, factorial, floor
from typing import Callable, Sequence, Union

from .density import (
    PhiResult,
    Trajectory,
    TrendPolicy,
    Verdict,
    member_verdict,
    mu,
    mu_trajectory,
    phi,
)
from .errors import EvaluationRangeError, FormatError, PseudoUnionError
from .families import WindowFamily, classical_prefix, factorial_blocks, family_union
from .sets import (
    EMPTY,
    ExplicitSet,
    IntegerSet,
    complement,
    contains,
    interval_union,
    is_finite,
    omega,
    restrict,
    set_union,
    tail,
)

__all__ = [
    "CharacteristicSequence",
    "ConstantSequence",
    "ConvergenceReport",
    "FileSequence",
    "PseudoUnionResult",
    "RealSequence",
    "ReciprocalSequence",
    "WitnessReport",
    "evaluate",
    "exceedance_set",
    "i_converges",
    "parse_seq",
    "pseudo_union",
    "separating_witness",
    "sequence_from_spec",
]


# ---------------------------------------------------------------------------
# real sequence specs


@dataclass(frozen=True)
class ReciprocalSequence:
    """x_k = 1/(k+1)."""


@dataclass(frozen=True)
class CharacteristicSequence:
    """x_k = 1 if k is in the carrier set, else 0."""

    carrier: IntegerSet


@dataclass(frozen=True)
class ConstantSequence:
    value: Fraction


@dataclass(frozen=True)
class FileSequence:
    """Exact rationals indexed from 0; evaluation beyond the range is an
    error, never zero-padding."""

    values: tuple[Fraction, ...]


RealSequence = Union[ReciprocalSequence, CharacteristicSequence, ConstantSequence, FileSequence]


def evaluate(seq: RealSequence, k: int) -> Fraction:
    if k < 0:
        raise EvaluationRangeError(f"sequence index must be nonnegative, got {k}")
    if isinstance(seq, ReciprocalSequence):
        return Fraction(1, k + 1)
    if isinstance(seq, CharacteristicSequence):
        return Fraction(1 if contains(seq.carrier, k) else 0)
    if isinstance(seq, ConstantSequence):
        return seq.value
    if k >= len(seq.values):
        raise EvaluationRangeError(
            f"index {k} beyond the sequence's declared range (length {len(seq.values)})"
        )
    return seq.values[k]


def parse_seq(text: str, path: str = "<seq>") -> FileSequence:
    """Parse the .seq format: one rational "p/q" or integer per line."""
    values: list[Fraction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(Fraction(line))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"not a rational: {line!r}", line=lineno, path=path)
    return FileSequence(tuple(values))


def sequence_from_spec(spec: str, set_resolver: Callable[[str], IntegerSet]) -> RealSequence:
    """CLI sequence grammar: reciprocal | const:<rat> | char:<set-spec> | file:<path>."""
    if spec == "reciprocal":
        return ReciprocalSequence()
    if spec.startswith("const:"):
        try:
            return ConstantSequence(Fraction(spec[len("const:"):]))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad constant in sequence spec {spec!r}")
    if spec.startswith("char:"):
        return CharacteristicSequence(set_resolver(spec[len("char:"):]))
    if spec.startswith("file:"):
        with open(spec[len("file:"):], "r", encoding="utf-8") as fh:
            return parse_seq(fh.read(), path=spec[len("file:"):])
    raise FormatError(
        f"unknown sequence spec {spec!r} (expected reciprocal|const:<rat>|char:<set>|file:<path>)"
    )


# ---------------------------------------------------------------------------
# exceedance sets and convergence


def _reciprocal_exceedance(limit: Fraction, eps: Fraction) -> IntegerSet:
    """{k : |1/(k+1) − L| >= ε} in closed form."""
    pieces: list[tuple[int, int | None]] = []
    upper = limit + eps  # "value >= L + ε" side
    if upper <= 0:
        return omega()
    # 1/(k+1) >= upper  <=>  k <= 1/upper − 1
    top = floor(Fraction(1) / upper - 1)
    if top >= 0:
        pieces.append((0, top))
    lower = limit - eps  # "value <= L − ε" side
    if lower > 0:
        # 1/(k+1) <= lower  <=>  k >= 1/lower − 1
        start = max(0, ceil(Fraction(1) / lower - 1))
        pieces.append((start, None))
    if not pieces:
        return EMPTY
    return interval_union(pieces)


def exceedance_set(
    seq: RealSequence, limit: Fraction, eps: Fraction, horizon: int | None = None
) -> IntegerSet:
    """The index set {k : |x_k − L| >= ε}.

    With ``horizon`` given, the result is clipped to [0, horizon] (and a
    file-backed sequence must cover that range). With ``horizon=None``
    closed-form sequences return their exact, possibly infinite,
    exceedance structure — this is what keeps infinite-set certificates
    alive downstream — and file-backed sequences are an error.
    """
    if eps <= 0:
        raise ValueError("ε must be positive")
    if isinstance(seq, FileSequence):
        if horizon is None:
            raise EvaluationRangeError(
                "a file-backed sequence has no closed form; supply a horizon"
            )
        if horizon >= len(seq.values):
            raise EvaluationRangeError(
                f"horizon {horizon} beyond the sequence's declared range "
                f"(length {len(seq.values)})"
            )
        hits = tuple(k for k in range(horizon + 1) if abs(seq.values[k] - limit) >= eps)
        return ExplicitSet(hits)
    if isinstance(seq, ConstantSequence):
        full = omega() if abs(seq.value - limit) >= eps else EMPTY
    elif isinstance(seq, ReciprocalSequence):
        full = _reciprocal_exceedance(limit, eps)
    else:
        assert isinstance(seq, CharacteristicSequence)
        on_carrier = abs(1 - limit) >= eps
        off_carrier = abs(limit) >= eps
        if on_carrier and off_carrier:
            full = omega()
        elif on_carrier:
            full = seq.carrier
        elif off_carrier:
            full = complement(seq.carrier)
        else:
            full = EMPTY
    return full if horizon is None else restrict(full, horizon)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-ε verdicts for convergence along a family's vanishing ideal.

    ``converges`` holds only when every ε-verdict is an exact or trend
    member; ``bottleneck`` names the ε carrying the weakest verdict.
    """

    limit: Fraction
    items: tuple[tuple[Fraction, Verdict], ...]
    converges: bool
    bottleneck: Fraction | None


_KIND_STRENGTH = {
    "member-exact": 0,
    "trend-member": 1,
    "trend-non-member": 2,
    "non-member-exact": 3,
    "inconclusive": 2,
}


def i_converges(
    family: WindowFamily,
    seq: RealSequence,
    limit: Fraction,
    epsilons: Sequence[Fraction],
    policy: TrendPolicy | None = None,
) -> ConvergenceReport:
    """Classify x_k -> L along the family's ideal, one verdict per ε."""
    if not epsilons:
        raise ValueError("need at least one ε")
    items = []
    for eps in epsilons:
        if isinstance(seq, FileSequence):
            exc = exceedance_set(seq, limit, eps, horizon=len(seq.values) - 1)
        else:
            exc = exceedance_set(seq, limit, eps)
        items.append((eps, member_verdict(family, exc, policy)))
    converges = all(v.member_like for _, v in items)
    bottleneck = None
    worst = -1
    for eps, v in items:
        strength = _KIND_STRENGTH[v.kind.value]
        if strength > worst:
            worst, bottleneck = strength, eps
    return ConvergenceReport(limit, tuple(items), converges, bottleneck)


# ---------------------------------------------------------------------------
# pseudo-union


@dataclass(frozen=True)
class PseudoUnionResult:
    """Almost-containment witness for finitely many ideal members.

    ``thresholds[i]`` is the least sampled cut m with
    phi(A_i ∖ [0, m]) <= tol(i); the union of those tails almost
    contains every member: A_i ∖ union ⊆ [0, thresholds[i]], a finite
    set, exactly by construction. ``phi_results[i]`` records each
    member's threshold-level phi evidence (exact or horizon-labeled).
    """

    union_set: IntegerSet
    thresholds: tuple[int, ...]
    tolerances: tuple[Fraction, ...]
    phi_results: tuple[PhiResult, ...]


DEFAULT_PSEUDO_SCAN = 1 << 17


def _default_grid(max_exponent: int) -> list[int]:
    return [0] + [1 << k for k in range(max_exponent + 1)]


def pseudo_union(
    family: WindowFamily,
    members: Sequence[IntegerSet],
    tol_schedule: Callable[[int], Fraction] | None = None,
    m_grid: Sequence[int] | None = None,
    scan_horizon: int | None = None,
    scan_cap: int | None = None,
) -> PseudoUnionResult:
    """Build one set almost-containing every member, with exact leftovers.

    The cut grid defaults to {0} ∪ {2^j : j <= 16}, scanned in order; the
    tolerance schedule defaults to tol(i) = 2^-i. A member whose tail
    densities never reach tolerance within the grid raises
    :class:`PseudoUnionError` naming it — it may not belong to the ideal
    at this evidence scale.
    """
    if not members:
        raise ValueError("need at least one member")
    tol = tol_schedule or (lambda i: Fraction(1, 2**i))
    grid = sorted(set(m_grid)) if m_grid is not None else _default_grid(16)
    thresholds: list[int] = []
    tolerances: list[Fraction] = []
    results: list[PhiResult] = []
    for i, member in enumerate(members):
        t = tol(i)
        if is_finite(member):
            horizon = scan_horizon  # None -> exact mode
        else:
            horizon = scan_horizon if scan_horizon is not None else DEFAULT_PSEUDO_SCAN
        found = None
        for m in grid:
            res = phi(family, tail(member, m), horizon=horizon, scan_cap=scan_cap)
            if res.value <= t:
                found = (m, res)
                break
        if found is None:
            raise PseudoUnionError(
                f"member {i} never reached tolerance {t} within the cut grid "
                f"(max cut {grid[-1]}); it may not belong to the ideal at this scale",
                member=i,
            )
        thresholds.append(found[0])
        tolerances.append(t)
        results.append(found[1])
    union: IntegerSet = EMPTY
    for member, m in zip(members, thresholds):
        union = set_union(union, tail(member, m))
    return PseudoUnionResult(union, tuple(thresholds), tuple(tolerances), tuple(results))


# ---------------------------------------------------------------------------
# the separating witness


@dataclass(frozen=True)
class WitnessReport:
    """Evidence that the block union separates the two ideals.

    ``mu_under_blocks`` is the density trajectory under the
    factorial-blocks family (identically 1: each window is a subset of
    the union). ``prefix_densities`` lists (n, n!, |A ∩ [1, n!]| / n!)
    under the classical family; from n = 3 on the values strictly
    decrease toward 0.
    """

    mu_under_blocks: Trajectory
    prefix_densities: tuple[tuple[int, int, Fraction], ...]
    block_family_label: str
    prefix_family_label: str


def separating_witness(
    family_a: WindowFamily | None = None,
    family_b: WindowFamily | None = None,
    block_index_max: int = 20,
    prefix_index_max: int = 10,
) -> tuple[IntegerSet, WitnessReport]:
    """The union of the factorial blocks, plus both sides of its story.

    Returns the generator-backed set A = ⋃_n [n!, n!+n] (with a horizon
    generous enough for every reported quantity) and a report holding
    its mu trajectory under ``family_b`` (factorial blocks; identically
    1) and its classical prefix densities at N = n! (vanishing).
    """
    fam_a = family_a or classical_prefix()
    fam_b = family_b or factorial_blocks()
    needed = max(
        factorial(block_index_max) + block_index_max, factorial(prefix_index_max)
    )
    horizon = max(factorial(21), 2 * needed)
    witness = family_union(fam_b, horizon=horizon)
    traj = mu_trajectory(fam_b, witness, 1, block_index_max)
    densities = []
    for n in range(1, prefix_index_max + 1):
        big_n = factorial(n)
        densities.append((n, big_n, mu(fam_a, big_n, witness)))
    return witness, WitnessReport(
        mu_under_blocks=traj,
        prefix_densities=tuple(densities),
        block_family_label=fam_b.label,
        prefix_family_label=fam_a.label,
    )
