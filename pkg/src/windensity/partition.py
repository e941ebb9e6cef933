"""Right-end dyadic slicing of windows into a level partition of [0, H].

Level n collects, from every window F_k, the integers in the closed real
interval [max F_k − |F_k|/2^n, max F_k − |F_k|/2^(n+1)] — the dyadic
slice hugging the window's right end. Levels are made into blocks two
ways:

* ``CHAINED`` runs the one-step recursion P_n = S_n minus P_{n-1},
  each level subtracting only its immediate predecessor; disjointness is
  then a measured property, not a guarantee, and for prefix-style
  families the recursion degenerates (level 0 swallows every initial
  segment);
* ``DISJOINTIFIED`` (default) subtracts all previous levels, so the
  blocks partition [0, H] by construction.

Block G_0 absorbs the residual [0, H] ∖ ⋃ levels. Windowed block norms
(max of mu over a declared window-index range) quantify how much density
each block retains and how fast the tails beyond a level fade — the two
quantities the construction is designed to balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .density import upper_density
from .families import WindowFamily
from .sets import (
    IntegerSet,
    IntervalSet,
    interval_union,
    restrict,
    set_difference,
    set_intersection,
    set_union,
    support_size,
)

__all__ = [
    "BlockNormReport",
    "Mode",
    "PartitionReport",
    "SliceInterval",
    "VerifyResult",
    "block_norm_report",
    "build_partition",
    "partition_csv",
    "slice_interval",
    "verify_partition",
]


class Mode(str, Enum):
    CHAINED = "chained"
    DISJOINTIFIED = "disjointified"


@dataclass(frozen=True)
class SliceInterval:
    """One window's dyadic slice at one level, with exact endpoints.

    ``members`` is the integer content [⌈lo⌉, ⌊hi⌋] ∩ [0, ∞), possibly
    empty when the real interval is too thin to catch an integer.
    """

    k: int
    n: int
    lo: Fraction
    hi: Fraction
    members: IntervalSet

    @property
    def member_count(self) -> int:
        return support_size(self.members)


def slice_interval(family: WindowFamily, k: int, n: int) -> SliceInterval:
    """The level-n dyadic slice of window F_k."""
    if n < 0:
        raise ValueError("slice level must be nonnegative")
    w = family.window(k)
    top = w.max_element
    size = w.size
    lo = top - Fraction(size, 2**n)
    hi = top - Fraction(size, 2 ** (n + 1))
    a = max(0, math.ceil(lo))
    b = math.floor(hi)
    members = IntervalSet(((a, b),)) if a <= b and b >= 0 else IntervalSet(())
    return SliceInterval(k=k, n=n, lo=lo, hi=hi, members=members)


@dataclass(frozen=True)
class VerifyResult:
    pairwise_disjoint: bool
    covers_horizon: bool
    overlap_witness: int | None
    gap_witness: int | None


@dataclass(frozen=True)
class PartitionReport:
    """Blocks G_0..G_n_max on [0, H] plus measured structure flags.

    In DISJOINTIFIED mode the flags are true by construction; in
    CHAINED mode they report what the one-step recursion actually
    produced. ``degenerate_levels`` lists the levels n >= 1 whose block
    is empty on [0, H] — the visible sign of the construction collapsing
    (level 0 having swallowed everything below the horizon).
    """

    family_label: str
    mode: Mode
    n_max: int
    k_max: int
    horizon: int
    blocks: tuple[IntegerSet, ...]
    pairwise_disjoint: bool
    covers_horizon: bool
    overlap_witness: int | None
    gap_witness: int | None
    degenerate_levels: tuple[int, ...]
    clipped: bool

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_levels)


def _least(a: IntegerSet) -> int | None:
    if isinstance(a, IntervalSet):
        return a.intervals[0][0] if a.intervals else None
    elems = getattr(a, "elements", ())
    return elems[0] if elems else None


def _verify_blocks(blocks: tuple[IntegerSet, ...], horizon: int) -> VerifyResult:
    overlap_witness: int | None = None
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            inter = set_intersection(blocks[i], blocks[j])
            least = _least(inter)
            if least is not None and (overlap_witness is None or least < overlap_witness):
                overlap_witness = least
    union: IntegerSet = IntervalSet(())
    for b in blocks:
        union = set_union(union, b)
    gaps = set_difference(IntervalSet(((0, horizon),)), union)
    gap_witness = _least(gaps)
    return VerifyResult(
        pairwise_disjoint=overlap_witness is None,
        covers_horizon=gap_witness is None,
        overlap_witness=overlap_witness,
        gap_witness=gap_witness,
    )


def build_partition(
    family: WindowFamily,
    n_max: int,
    k_max: int,
    horizon: int,
    mode: Mode = Mode.DISJOINTIFIED,
) -> PartitionReport:
    """Assemble levels from all windows k <= k_max and cut blocks on [0, H].

    Levels whose slices reach beyond the horizon are clipped (recorded in
    ``clipped``); full fidelity needs H at least the largest slice
    member.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if n_max < 0 or k_max < 0:
        raise ValueError("n_max and k_max must be nonnegative")
    mode = Mode(mode)

    raw_levels: list[IntervalSet] = []
    clipped = False
    for n in range(n_max + 1):
        pairs = []
        for k in range(k_max + 1):
            s = slice_interval(family, k, n)
            for lo, hi in s.members.intervals:
                assert hi is not None
                if lo > horizon:
                    clipped = True
                    continue
                if hi > horizon:
                    clipped = True
                    hi = horizon
                pairs.append((lo, hi))
        raw_levels.append(interval_union(pairs))

    levels: list[IntegerSet] = []
    if mode is Mode.CHAINED:
        prev: IntegerSet = IntervalSet(())
        for s in raw_levels:
            cur = set_difference(s, prev)
            levels.append(cur)
            prev = cur
    else:
        seen: IntegerSet = IntervalSet(())
        for s in raw_levels:
            cur = set_difference(s, seen)
            levels.append(cur)
            seen = set_union(seen, cur)

    full = IntervalSet(((0, horizon),))
    all_levels: IntegerSet = IntervalSet(())
    for lv in levels:
        all_levels = set_union(all_levels, lv)
    residual = set_difference(full, all_levels)
    blocks = [set_union(levels[0], residual)] + levels[1:]
    blocks = [restrict(b, horizon) for b in blocks]

    check = _verify_blocks(tuple(blocks), horizon)
    degenerate = tuple(
        n for n in range(1, n_max + 1) if support_size(blocks[n]) == 0
    )
    return PartitionReport(
        family_label=family.label,
        mode=mode,
        n_max=n_max,
        k_max=k_max,
        horizon=horizon,
        blocks=tuple(blocks),
        pairwise_disjoint=check.pairwise_disjoint,
        covers_horizon=check.covers_horizon,
        overlap_witness=check.overlap_witness,
        gap_witness=check.gap_witness,
        degenerate_levels=degenerate,
        clipped=clipped,
    )


def verify_partition(report: PartitionReport, horizon: int | None = None) -> VerifyResult:
    """Exact disjointness and coverage check of the report's blocks.

    Recomputed from the blocks themselves (independent of the flags set
    at build time); on failure the witnesses name the least offending
    integer.
    """
    h = report.horizon if horizon is None else horizon
    blocks = report.blocks if horizon is None else tuple(restrict(b, h) for b in report.blocks)
    return _verify_blocks(blocks, h)


@dataclass(frozen=True)
class BlockNormReport:
    """Windowed norms of the blocks and of the tails beyond each level.

    ``block_norms[n]`` = max mu_k(G_n) over k in [k_lo, k_hi] (exact);
    ``tail_norms[n]`` = the same max for ⋃_{j > n} G_j. Always read with
    the window attached: these are finite surrogates for limsups.
    """

    k_lo: int
    k_hi: int
    block_norms: tuple[Fraction, ...]
    tail_norms: tuple[Fraction, ...]


def block_norm_report(
    family: WindowFamily, report: PartitionReport, k_lo: int, k_hi: int
) -> BlockNormReport:
    if k_lo < 0 or k_hi < k_lo:
        raise ValueError(f"bad norm window [{k_lo}, {k_hi}]")
    block_norms = tuple(
        upper_density(family, b, k_lo, k_hi) for b in report.blocks
    )
    tail_norms = []
    for n in range(report.n_max + 1):
        tail_set: IntegerSet = IntervalSet(())
        for j in range(n + 1, report.n_max + 1):
            tail_set = set_union(tail_set, report.blocks[j])
        tail_norms.append(upper_density(family, tail_set, k_lo, k_hi))
    return BlockNormReport(k_lo, k_hi, block_norms, tuple(tail_norms))


def partition_csv(report: PartitionReport, norms: BlockNormReport) -> str:
    """Stable CSV, one row per block:
    n,block_size,window_lo,window_hi,norm_num,norm_den,tail_num,tail_den."""
    lines = ["n,block_size,window_lo,window_hi,norm_num,norm_den,tail_num,tail_den"]
    for n in range(report.n_max + 1):
        bn = norms.block_norms[n]
        tn = norms.tail_norms[n]
        lines.append(
            f"{n},{support_size(report.blocks[n])},{norms.k_lo},{norms.k_hi},"
            f"{bn.numerator},{bn.denominator},{tn.numerator},{tn.denominator}"
        )
    return "\n".join(lines) + "\n"
