"""Representations of subsets of the nonnegative integers and exact finite
set algebra.

Three representations cover the library's needs:

* :class:`ExplicitSet` — a sorted tuple of elements (always finite);
* :class:`IntervalSet` — a normalized union of closed integer intervals,
  where the last interval may be unbounded;
* :class:`GeneratorSet` — a membership predicate with a certified
  enumeration horizon; queries above the horizon raise
  :class:`~windensity.errors.HorizonError` rather than silently lying.

Everything downstream reduces to counting intersections with finite
windows, so :func:`intersect_card` is the hot path: it dispatches on the
representation and never materializes a contiguous window.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Union

from .errors import FormatError, HorizonError

__all__ = [
    "EMPTY",
    "ExplicitSet",
    "GeneratorSet",
    "IntegerSet",
    "IntervalSet",
    "Window",
    "complement",
    "contains",
    "enumerate_up_to",
    "explicit",
    "format_iset",
    "intersect_card",
    "interval_union",
    "is_finite",
    "max_element",
    "normalize_intervals",
    "omega",
    "parse_iset",
    "restrict",
    "set_difference",
    "set_intersection",
    "set_union",
    "sets_equal",
    "support_size",
    "tail",
]

# intervals are (lo, hi) with hi = None meaning unbounded
Interval = tuple[int, Union[int, None]]

# above this window size, generator sets are counted via a cached sorted
# enumeration + bisect instead of one predicate call per window element
_PREDICATE_CUTOFF = 4096


@dataclass(frozen=True)
class ExplicitSet:
    """A finite set stored as a strictly increasing tuple."""

    elements: tuple[int, ...]
    provenance: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        prev = -1
        for x in self.elements:
            if x <= prev:
                raise ValueError("elements must be strictly increasing and nonnegative")
            prev = x

    def __contains__(self, x: int) -> bool:
        i = bisect_left(self.elements, x)
        return i < len(self.elements) and self.elements[i] == x

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class IntervalSet:
    """A normalized union of closed intervals [a, b] of nonnegative integers.

    Normalized means sorted, pairwise disjoint and non-adjacent
    (b_i + 1 < a_{i+1}); only the last interval may have ``hi = None``
    (unbounded).
    """

    intervals: tuple[Interval, ...]
    provenance: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        prev_hi = -2
        for lo, hi in self.intervals:
            if lo < 0:
                raise ValueError("interval endpoints must be nonnegative")
            if prev_hi is None:
                raise ValueError("only the last interval may be unbounded")
            if lo <= prev_hi + 1:
                raise ValueError("intervals must be sorted, disjoint and non-adjacent")
            if hi is not None and hi < lo:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            prev_hi = hi

    def __contains__(self, x: int) -> bool:
        ivs = self.intervals
        i = bisect_right(ivs, (x, _TOP)) - 1
        if i < 0:
            return False
        lo, hi = ivs[i]
        return lo <= x and (hi is None or x <= hi)

    @property
    def bounded(self) -> bool:
        return not self.intervals or self.intervals[-1][1] is not None


class _Top:
    """Sorts after every int and after None in interval tuples."""

    def __lt__(self, other: object) -> bool:
        return False

    def __gt__(self, other: object) -> bool:
        return True


_TOP = _Top()


@dataclass(frozen=True)
class GeneratorSet:
    """A set given by a membership predicate, trusted only up to ``horizon``.

    ``enumerator``, when provided, must yield the set's elements in strictly
    increasing order; it makes enumerating sparse sets (squares, factorial
    blocks) cheap. Membership and enumeration queries beyond the certified
    horizon raise :class:`HorizonError`.
    """

    predicate: Callable[[int], bool]
    horizon: int
    enumerator: Callable[[], Iterator[int]] | None = None
    label: str = "generator"
    provenance: tuple | None = field(default=None, compare=False, repr=False)
    _cache: dict = field(
        default_factory=lambda: {"lock": threading.Lock()}, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")

    def _ensure(self, h: int) -> list[int]:
        """Internal sorted element list covering [0, h]; callers must not
        mutate it and must bisect with an explicit upper bound <= h."""
        if h > self.horizon:
            raise HorizonError(
                f"enumeration of '{self.label}' up to {h} exceeds certified horizon {self.horizon}"
            )
        cache = self._cache
        if h <= cache.get("upto", -1):
            return cache["elems"]
        with cache["lock"]:
            if "elems" not in cache:
                cache["elems"] = []
                cache["upto"] = -1
                if self.enumerator is not None:
                    cache["iter"] = self.enumerator()
                    cache["pending"] = None
            elems = cache["elems"]
            if h <= cache["upto"]:
                return elems
            if self.enumerator is not None:
                pending = cache["pending"]
                if pending is not None and pending <= h:
                    elems.append(pending)
                    cache["pending"] = None
                    pending = None
                if pending is None:
                    last = elems[-1] if elems else -1
                    for x in cache["iter"]:
                        if x <= last:
                            raise ValueError(
                                f"enumerator of '{self.label}' is not strictly increasing"
                            )
                        if x > h:
                            cache["pending"] = x
                            break
                        elems.append(x)
                        last = x
            else:
                elems.extend(x for x in range(cache["upto"] + 1, h + 1) if self.predicate(x))
            cache["upto"] = h
            return elems

    def _elements_up_to(self, h: int) -> list[int]:
        """Sorted elements in [0, h], as a fresh list."""
        elems = self._ensure(h)
        return elems[: bisect_right(elems, h)]


IntegerSet = Union[ExplicitSet, IntervalSet, GeneratorSet]

EMPTY = ExplicitSet(())


def explicit(values: Iterable[int]) -> ExplicitSet:
    """Build an :class:`ExplicitSet` from any iterable (sorts, dedups)."""
    return ExplicitSet(tuple(sorted(set(values))))


def normalize_intervals(pairs: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge overlapping/adjacent closed intervals.

    Idempotent: normalizing an already normalized tuple returns an equal
    tuple.
    """
    items = sorted(pairs, key=lambda p: (p[0], -1 if p[1] is None else p[1]))
    out: list[Interval] = []
    for lo, hi in items:
        if lo < 0 or (hi is not None and hi < lo):
            raise ValueError(f"bad interval [{lo}, {hi}]")
        if out:
            plo, phi = out[-1]
            if phi is None:
                continue  # previous interval already swallows everything
            if lo <= phi + 1:
                if hi is None or hi > phi:
                    out[-1] = (plo, hi)
                continue
        out.append((lo, hi))
    return tuple(out)


def interval_union(pairs: Iterable[Interval], provenance: tuple | None = None) -> IntervalSet:
    """Normalizing :class:`IntervalSet` constructor."""
    return IntervalSet(normalize_intervals(pairs), provenance=provenance)


def omega(start: int = 0) -> IntervalSet:
    """The cofinite interval set [start, ∞)."""
    return IntervalSet(((start, None),))


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class Window:
    """A nonempty finite window F_n.

    Stored either as a contiguous range [lo, hi] (``explicit is None``) or
    as an explicit sorted tuple; both builtin families produce contiguous
    windows, which keeps counting O(log) instead of O(|F_n|).
    """

    lo: int
    hi: int
    explicit_elements: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError("window must be a nonempty range of nonnegative integers")
        ee = self.explicit_elements
        if ee is not None:
            if not ee or ee[0] != self.lo or ee[-1] != self.hi:
                raise ValueError("explicit window elements must match declared bounds")
            prev = -1
            for x in ee:
                if x <= prev:
                    raise ValueError("window elements must be strictly increasing")
                prev = x

    @classmethod
    def contiguous(cls, lo: int, hi: int) -> "Window":
        return cls(lo, hi)

    @classmethod
    def from_elements(cls, values: Iterable[int]) -> "Window":
        ee = tuple(sorted(set(values)))
        if not ee:
            raise ValueError("window must be nonempty")
        if ee[-1] - ee[0] + 1 == len(ee):
            return cls(ee[0], ee[-1])  # collapses to a contiguous range
        return cls(ee[0], ee[-1], ee)

    @property
    def is_contiguous(self) -> bool:
        return self.explicit_elements is None

    @property
    def size(self) -> int:
        if self.explicit_elements is not None:
            return len(self.explicit_elements)
        return self.hi - self.lo + 1

    @property
    def min_element(self) -> int:
        return self.lo

    @property
    def max_element(self) -> int:
        return self.hi

    @property
    def elements(self) -> tuple[int, ...]:
        if self.explicit_elements is not None:
            return self.explicit_elements
        return tuple(range(self.lo, self.hi + 1))

    def __contains__(self, x: int) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if self.explicit_elements is None:
            return True
        i = bisect_left(self.explicit_elements, x)
        return self.explicit_elements[i] == x

    def __iter__(self) -> Iterator[int]:
        if self.explicit_elements is not None:
            return iter(self.explicit_elements)
        return iter(range(self.lo, self.hi + 1))


# ---------------------------------------------------------------------------
# queries


def is_finite(a: IntegerSet) -> bool:
    """True when the set is known finite (explicit, or bounded intervals)."""
    if isinstance(a, ExplicitSet):
        return True
    if isinstance(a, IntervalSet):
        return a.bounded
    return False


def support_size(a: IntegerSet) -> int:
    """Cardinality of a known-finite set."""
    if isinstance(a, ExplicitSet):
        return len(a.elements)
    if isinstance(a, IntervalSet) and a.bounded:
        return sum(hi - lo + 1 for lo, hi in a.intervals)  # type: ignore[operator]
    raise ValueError("support_size needs a known-finite set")


def max_element(a: IntegerSet) -> int | None:
    """Largest element of a known-finite set; None when empty."""
    if isinstance(a, ExplicitSet):
        return a.elements[-1] if a.elements else None
    if isinstance(a, IntervalSet) and a.bounded:
        return a.intervals[-1][1] if a.intervals else None
    raise ValueError("max_element needs a known-finite set")


def contains(a: IntegerSet, x: int) -> bool:
    if x < 0:
        return False
    if isinstance(a, GeneratorSet):
        if x > a.horizon:
            raise HorizonError(
                f"membership query {x} exceeds certified horizon {a.horizon} of '{a.label}'"
            )
        return bool(a.predicate(x))
    return x in a


def _count_in_range(a: IntegerSet, lo: int, hi: int) -> int:
    """|a ∩ [lo, hi]| for explicit/interval sets."""
    if lo > hi:
        return 0
    if isinstance(a, ExplicitSet):
        return bisect_right(a.elements, hi) - bisect_left(a.elements, lo)
    assert isinstance(a, IntervalSet)
    total = 0
    ivs = a.intervals
    i = bisect_right(ivs, (lo, _TOP)) - 1
    if i < 0:
        i = 0
    for alo, ahi in ivs[i:]:
        if alo > hi:
            break
        top = hi if ahi is None else min(ahi, hi)
        bot = max(alo, lo)
        if bot <= top:
            total += top - bot + 1
    return total


def intersect_card(a: IntegerSet, w: Window) -> int:
    """|A ∩ W|, exactly.

    For a generator set the window must sit within the certified horizon.
    """
    if isinstance(a, (ExplicitSet, IntervalSet)):
        if w.is_contiguous:
            return _count_in_range(a, w.lo, w.hi)
        if isinstance(a, ExplicitSet) and len(a.elements) < w.size:
            return sum(1 for x in a.elements if x in w)
        return sum(1 for x in w.explicit_elements if x in a)  # type: ignore[union-attr]
    assert isinstance(a, GeneratorSet)
    if w.max_element > a.horizon:
        raise HorizonError(
            f"window max {w.max_element} exceeds certified horizon {a.horizon} of '{a.label}'"
        )
    # with an enumerator, the cached sorted enumeration is cheap (cost is the
    # number of elements, not the window width); without one, fall back to
    # per-element predicate calls for small windows and to a one-off
    # predicate sweep (amortized across ascending scans) for wide ones
    if w.is_contiguous and (a.enumerator is not None or w.size > _PREDICATE_CUTOFF):
        elems = a._ensure(w.max_element)
        return bisect_right(elems, w.hi) - bisect_left(elems, w.lo)
    return sum(1 for x in w if a.predicate(x))


def enumerate_up_to(a: IntegerSet, h: int) -> list[int]:
    """Sorted elements of A ∩ [0, h]."""
    if h < 0:
        return []
    if isinstance(a, ExplicitSet):
        return list(a.elements[: bisect_right(a.elements, h)])
    if isinstance(a, IntervalSet):
        out: list[int] = []
        for lo, hi in a.intervals:
            if lo > h:
                break
            out.extend(range(lo, (h if hi is None else min(hi, h)) + 1))
        return out
    return a._elements_up_to(h)


# ---------------------------------------------------------------------------
# algebra


def _to_intervals(a: IntegerSet) -> tuple[Interval, ...]:
    if isinstance(a, IntervalSet):
        return a.intervals
    assert isinstance(a, ExplicitSet)
    return normalize_intervals((x, x) for x in a.elements)


def _interval_complement(ivs: tuple[Interval, ...]) -> tuple[Interval, ...]:
    """Complement within [0, ∞)."""
    out: list[Interval] = []
    cursor = 0
    for lo, hi in ivs:
        if lo > cursor:
            out.append((cursor, lo - 1))
        if hi is None:
            return tuple(out)
        cursor = hi + 1
    out.append((cursor, None))
    return tuple(out)


def _interval_intersection(
    xs: tuple[Interval, ...], ys: tuple[Interval, ...]
) -> tuple[Interval, ...]:
    out: list[Interval] = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        alo, ahi = xs[i]
        blo, bhi = ys[j]
        lo = max(alo, blo)
        if ahi is None and bhi is None:
            out.append((lo, None))
            break
        hi = bhi if ahi is None else ahi if bhi is None else min(ahi, bhi)
        if hi is not None and lo <= hi:
            out.append((lo, hi))
        # advance the side that ends first
        if ahi is not None and (bhi is None or ahi <= bhi):
            i += 1
        else:
            j += 1
    return tuple(out)


def _as_interval_result(ivs: tuple[Interval, ...], want_explicit: bool) -> IntegerSet:
    if want_explicit:
        elems: list[int] = []
        for lo, hi in ivs:
            assert hi is not None
            elems.extend(range(lo, hi + 1))
        return ExplicitSet(tuple(elems))
    return IntervalSet(ivs)


def _finite_pair_op(a: IntegerSet, b: IntegerSet, op: str) -> IntegerSet:
    xs, ys = _to_intervals(a), _to_intervals(b)
    if op == "union":
        res = normalize_intervals(itertools.chain(xs, ys))
    elif op == "difference":
        res = _interval_intersection(xs, _interval_complement(ys))
    else:
        res = _interval_intersection(xs, ys)
    both_explicit = isinstance(a, ExplicitSet) and isinstance(b, ExplicitSet)
    keep_explicit = isinstance(a, ExplicitSet) and op != "union"
    return _as_interval_result(res, both_explicit or keep_explicit)


def _generator_binop(a: IntegerSet, b: IntegerSet, op: str) -> GeneratorSet:
    """union/difference/intersection where at least one side is generator-backed."""

    def side(s: IntegerSet):
        if isinstance(s, GeneratorSet):
            return s.predicate, s.horizon, s.enumerator, s.label
        ivs = _to_intervals(s)
        holder = IntervalSet(ivs) if not isinstance(s, ExplicitSet) else s

        def pred(x: int, _h=holder) -> bool:
            return x in _h

        def enum(_h=holder) -> Iterator[int]:
            for lo, hi in _to_intervals(_h):
                it = itertools.count(lo) if hi is None else range(lo, hi + 1)
                yield from it

        return pred, None, enum, "set"

    pa, ha, ea, la = side(a)
    pb, hb, eb, lb = side(b)
    horizons = [h for h in (ha, hb) if h is not None]
    horizon = min(horizons)
    sym = {"union": "∪", "difference": "∖", "intersection": "∩"}[op]
    label = f"({la} {sym} {lb})"

    if op == "union":
        pred = lambda x: pa(x) or pb(x)  # noqa: E731
        enum = None
        if ea is not None and eb is not None:
            def enum(_ea=ea, _eb=eb) -> Iterator[int]:
                last = -1
                for x in heapq.merge(_ea(), _eb()):
                    if x != last:
                        yield x
                        last = x
    elif op == "difference":
        pred = lambda x: pa(x) and not pb(x)  # noqa: E731
        enum = None
        if ea is not None:
            def enum(_ea=ea, _pb=pb) -> Iterator[int]:
                return (x for x in _ea() if not _pb(x))
    else:
        pred = lambda x: pa(x) and pb(x)  # noqa: E731
        enum = None
        if ea is not None:
            def enum(_ea=ea, _pb=pb) -> Iterator[int]:
                return (x for x in _ea() if _pb(x))

    return GeneratorSet(pred, horizon, enum, label=label)


def set_union(a: IntegerSet, b: IntegerSet) -> IntegerSet:
    if isinstance(a, GeneratorSet) or isinstance(b, GeneratorSet):
        return _generator_binop(a, b, "union")
    return _finite_pair_op(a, b, "union")


def set_difference(a: IntegerSet, b: IntegerSet) -> IntegerSet:
    """A ∖ B, exact.

    A finite set minus a generator set stays finite: the generator side is
    evaluated pointwise (all elements must lie within its horizon).
    """
    if isinstance(a, (ExplicitSet, IntervalSet)) and isinstance(b, GeneratorSet):
        if not is_finite(a):
            # subtract the generator's enumerated points over a's bounded span
            last = a.intervals[-1]
            bound = b.horizon if last[1] is None else last[1]
            pts = explicit(b._elements_up_to(bound))
            return _finite_pair_op(a, pts, "difference")
        top = max_element(a)
        if top is None:
            return EMPTY
        keep = [x for x in enumerate_up_to(a, top) if not contains(b, x)]
        return ExplicitSet(tuple(keep)) if isinstance(a, ExplicitSet) else explicit(keep)
    if isinstance(a, GeneratorSet):
        return _generator_binop(a, b, "difference")
    return _finite_pair_op(a, b, "difference")


def set_intersection(a: IntegerSet, b: IntegerSet) -> IntegerSet:
    if isinstance(a, GeneratorSet) and isinstance(b, (ExplicitSet, IntervalSet)) and is_finite(b):
        return set_intersection(b, a)
    if isinstance(a, (ExplicitSet, IntervalSet)) and isinstance(b, GeneratorSet):
        if not is_finite(a):
            return _generator_binop(a, b, "intersection")
        top = max_element(a)
        keep = [x for x in enumerate_up_to(a, top if top is not None else -1) if contains(b, x)]
        return ExplicitSet(tuple(keep)) if isinstance(a, ExplicitSet) else explicit(keep)
    if isinstance(a, GeneratorSet):
        return _generator_binop(a, b, "intersection")
    return _finite_pair_op(a, b, "intersection")


def complement(a: IntegerSet) -> IntegerSet:
    """ω ∖ A."""
    if isinstance(a, GeneratorSet):
        return GeneratorSet(
            lambda x: not a.predicate(x), a.horizon, None, label=f"(ω ∖ {a.label})"
        )
    return IntervalSet(_interval_complement(_to_intervals(a)))


def tail(a: IntegerSet, m: int) -> IntegerSet:
    """Elements of A strictly greater than m (A with prefix [0, m] removed).

    Preserves the representation kind.
    """
    if m < 0:
        return a
    if isinstance(a, ExplicitSet):
        return ExplicitSet(a.elements[bisect_right(a.elements, m):])
    if isinstance(a, IntervalSet):
        out: list[Interval] = []
        for lo, hi in a.intervals:
            if hi is not None and hi <= m:
                continue
            out.append((max(lo, m + 1), hi))
        return IntervalSet(tuple(out))
    enum = None
    if a.enumerator is not None:
        def enum(_e=a.enumerator, _m=m) -> Iterator[int]:
            return (x for x in _e() if x > _m)
    return GeneratorSet(
        lambda x: x > m and a.predicate(x), a.horizon, enum, label=f"({a.label} ∖ [0,{m}])"
    )


def restrict(a: IntegerSet, h: int) -> IntegerSet:
    """A ∩ [0, h]; generator sets come back explicit."""
    if h < 0:
        return EMPTY
    if isinstance(a, ExplicitSet):
        return ExplicitSet(a.elements[: bisect_right(a.elements, h)])
    if isinstance(a, IntervalSet):
        out: list[Interval] = []
        for lo, hi in a.intervals:
            if lo > h:
                break
            out.append((lo, h if hi is None else min(hi, h)))
        return IntervalSet(tuple(out))
    return ExplicitSet(tuple(a._elements_up_to(h)))


def sets_equal(a: IntegerSet, b: IntegerSet) -> bool:
    """Extensional equality across representation kinds (finite/interval only)."""
    if isinstance(a, GeneratorSet) or isinstance(b, GeneratorSet):
        raise ValueError("extensional equality of generator sets is not decidable")
    return _to_intervals(a) == _to_intervals(b)


# ---------------------------------------------------------------------------
# .iset text format


def parse_iset(text: str, path: str = "<iset>") -> IntegerSet:
    """Parse the .iset format: one "a" or "a b" per line, sorted, disjoint.

    "#" starts a comment. Unsorted or overlapping lines are rejected with
    the offending line number; adjacent-but-disjoint intervals are merged
    into the normalized value.
    """
    pairs: list[Interval] = []
    any_interval_line = False
    prev_hi = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise FormatError(f"not an integer token: {line!r}", line=lineno, path=path)
        if any(v < 0 for v in nums):
            raise FormatError("negative values not allowed", line=lineno, path=path)
        if len(nums) == 1:
            lo = hi = nums[0]
        elif len(nums) == 2:
            lo, hi = nums
            any_interval_line = True
            if hi < lo:
                raise FormatError(f"interval end {hi} below start {lo}", line=lineno, path=path)
        else:
            raise FormatError("expected one or two integers per line", line=lineno, path=path)
        if pairs and lo <= prev_hi:
            raise FormatError(
                f"line overlaps or is unsorted relative to the previous one (starts at {lo}, "
                f"previous ends at {prev_hi})",
                line=lineno,
                path=path,
            )
        pairs.append((lo, hi))
        prev_hi = hi
    if any_interval_line:
        return interval_union(pairs)
    return ExplicitSet(tuple(lo for lo, _ in pairs))


def format_iset(a: IntegerSet) -> str:
    """Emit the .iset format; explicit sets as single integers, interval
    sets as "a b" lines, so the representation kind round-trips."""
    if isinstance(a, ExplicitSet):
        return "".join(f"{x}\n" for x in a.elements)
    if isinstance(a, IntervalSet):
        if not a.bounded:
            raise ValueError("cannot serialize an unbounded interval set to .iset")
        return "".join(f"{lo} {hi}\n" for lo, hi in a.intervals)
    raise ValueError("cannot serialize a generator-backed set; restrict() it first")
