"""Core set representations and exact finite set algebra."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from windensity.errors import FormatError, HorizonError
from windensity.sets import (
    EMPTY,
    ExplicitSet,
    GeneratorSet,
    IntervalSet,
    Window,
    complement,
    contains,
    enumerate_up_to,
    explicit,
    format_iset,
    intersect_card,
    interval_union,
    normalize_intervals,
    parse_iset,
    restrict,
    set_difference,
    set_intersection,
    set_union,
    sets_equal,
    support_size,
    tail,
)


def squares(horizon=10**6):
    def gen():
        i = 0
        while True:
            yield i * i
            i += 1

    return GeneratorSet(lambda x: math.isqrt(x) ** 2 == x, horizon, gen, label="squares")


def evens(horizon=10**6):
    return GeneratorSet(lambda x: x % 2 == 0, horizon, label="evens")


small_sets = st.frozensets(st.integers(0, 300), max_size=40)


# --- construction invariants


def test_explicit_rejects_unsorted():
    with pytest.raises(ValueError):
        ExplicitSet((3, 1))
    with pytest.raises(ValueError):
        ExplicitSet((1, 1))
    with pytest.raises(ValueError):
        ExplicitSet((-1, 2))


def test_interval_set_rejects_non_normalized():
    with pytest.raises(ValueError):
        IntervalSet(((0, 5), (5, 9)))  # overlap
    with pytest.raises(ValueError):
        IntervalSet(((0, 5), (6, 9)))  # adjacent
    with pytest.raises(ValueError):
        IntervalSet(((5, 3),))
    with pytest.raises(ValueError):
        IntervalSet(((0, None), (5, 9)))  # unbounded not last


def test_normalize_idempotent_on_examples():
    pairs = [(5, 9), (0, 3), (4, 4), (20, None)]
    once = normalize_intervals(pairs)
    assert normalize_intervals(once) == once
    assert once == ((0, 9), (20, None))


@given(st.lists(st.tuples(st.integers(0, 200), st.integers(0, 50)), max_size=15))
def test_normalize_idempotent(raw):
    pairs = [(a, a + w) for a, w in raw]
    once = normalize_intervals(pairs)
    assert normalize_intervals(once) == once
    IntervalSet(once)  # accepted as already normalized


def test_window_contiguous_and_explicit():
    w = Window.contiguous(5040, 5047)
    assert w.size == 8 and w.max_element == 5047 and w.min_element == 5040
    assert w.elements == tuple(range(5040, 5048))
    w2 = Window.from_elements([9, 3, 5])
    assert w2.elements == (3, 5, 9) and w2.size == 3 and not w2.is_contiguous
    assert Window.from_elements([4, 5, 6]).is_contiguous
    with pytest.raises(ValueError):
        Window.from_elements([])
    with pytest.raises(ValueError):
        Window.contiguous(5, 4)


# --- intersect_card


def test_intersect_card_spec_values():
    w = Window.contiguous(5040, 5047)
    assert intersect_card(EMPTY, w) == 0
    assert intersect_card(IntervalSet(((5040, 5047),)), w) == 8
    assert intersect_card(squares(), Window.contiguous(1, 30)) == 5  # 1,4,9,16,25


def test_intersect_card_generator_horizon():
    s = squares(horizon=100)
    with pytest.raises(HorizonError):
        intersect_card(s, Window.contiguous(50, 200))
    assert intersect_card(s, Window.contiguous(0, 100)) == 11


def test_intersect_card_explicit_window():
    w = Window.from_elements([2, 5, 11])
    assert intersect_card(explicit([5, 11, 40]), w) == 2
    assert intersect_card(IntervalSet(((0, 3), (10, None))), w) == 2
    assert intersect_card(evens(100), w) == 1


def _to_pyset(a, h):
    return set(enumerate_up_to(a, h))


@given(small_sets, small_sets)
def test_inclusion_exclusion(xs, ys):
    a, b = explicit(xs), explicit(ys)
    w = Window.contiguous(10, 120)
    union, inter = set_union(a, b), set_intersection(a, b)
    assert intersect_card(union, w) + intersect_card(inter, w) == intersect_card(
        a, w
    ) + intersect_card(b, w)


@given(small_sets, st.integers(0, 350))
def test_intersect_card_matches_enumeration(xs, hi):
    a = explicit(xs)
    w = Window.contiguous(max(0, hi - 37), hi)
    assert intersect_card(a, w) == len([x for x in enumerate_up_to(a, hi) if w.lo <= x <= w.hi])


# --- tail / restrict / enumerate


def test_tail_spec_values():
    assert tail(explicit([1, 2, 3]), 2).elements == (3,)
    t = tail(IntervalSet(((10, 20),)), 14)
    assert t.intervals == ((15, 20),)
    assert tail(EMPTY, 0).elements == ()


def test_tail_preserves_kind_and_partitions():
    a = IntervalSet(((3, 8), (12, None)))
    t = tail(a, 6)
    assert isinstance(t, IntervalSet) and t.intervals == ((7, 8), (12, None))
    g = tail(squares(500), 10)
    assert isinstance(g, GeneratorSet)
    assert enumerate_up_to(g, 100) == [16, 25, 36, 49, 64, 81, 100]


@given(small_sets, st.integers(0, 320))
def test_tail_partition_identity(xs, m):
    a = explicit(xs)
    low = restrict(a, m)
    high = tail(a, m)
    assert _to_pyset(high, 320) & set(range(m + 1)) == set()
    assert _to_pyset(set_union(high, low), 320) == _to_pyset(a, 320)


def test_restrict_spec_values():
    assert restrict(evens(), 7).elements == (0, 2, 4, 6)
    assert restrict(IntervalSet(((3, 5), (9, 9))), 4).intervals == ((3, 4),)
    assert enumerate_up_to(squares(), 10) == [0, 1, 4, 9]
    assert enumerate_up_to(EMPTY, 100) == []
    assert enumerate_up_to(IntervalSet(((3, 5), (9, 9))), 4) == [3, 4]


# --- algebra


def test_union_difference_spec_values():
    u = set_union(explicit([1, 2]), explicit([2, 3]))
    assert u.elements == (1, 2, 3)
    d = set_difference(IntervalSet(((1, 4),)), IntervalSet(((2, 3),)))
    assert d.intervals == ((1, 1), (4, 4))


@given(small_sets, small_sets)
def test_algebra_matches_python_sets(xs, ys):
    a, b = explicit(xs), explicit(ys)
    assert _to_pyset(set_union(a, b), 320) == xs | ys
    assert _to_pyset(set_difference(a, b), 320) == xs - ys
    assert _to_pyset(set_intersection(a, b), 320) == xs & ys


interval_specs = st.lists(
    st.tuples(st.integers(0, 150), st.integers(0, 20)), max_size=6
).flatmap(
    lambda pairs: st.booleans().map(
        lambda unbounded: (pairs, 160 if unbounded else None)
    )
)


def _build_interval_set(spec):
    pairs, tail_start = spec
    raw = [(a, a + w) for a, w in pairs]
    if tail_start is not None:
        raw.append((tail_start, None))
    return interval_union(raw)


@given(interval_specs, interval_specs)
def test_interval_algebra_matches_python_sets(sa, sb):
    h = 200
    a, b = _build_interval_set(sa), _build_interval_set(sb)
    pa, pb = _to_pyset(a, h), _to_pyset(b, h)
    assert _to_pyset(set_union(a, b), h) == pa | pb
    assert _to_pyset(set_difference(a, b), h) == pa - pb
    assert _to_pyset(set_intersection(a, b), h) == pa & pb
    assert _to_pyset(complement(a), h) == set(range(h + 1)) - pa


def test_generator_algebra():
    sq, ev = squares(1000), evens(1000)
    u = set_union(sq, ev)
    assert enumerate_up_to(u, 20) == [0, 1, 2, 4, 6, 8, 9, 10, 12, 14, 16, 18, 20]
    d = set_difference(sq, ev)  # odd squares
    assert enumerate_up_to(d, 100) == [1, 9, 25, 49, 81]
    i = set_intersection(sq, ev)
    assert enumerate_up_to(i, 100) == [0, 4, 16, 36, 64, 100]
    assert u.horizon == 1000
    fin = set_difference(explicit([0, 1, 2, 3, 4]), sq)
    assert fin.elements == (2, 3)


def test_unbounded_minus_generator():
    d = set_difference(IntervalSet(((0, None),)), squares(100))
    assert enumerate_up_to(d, 10) == [2, 3, 5, 6, 7, 8, 10]


def test_complement():
    c = complement(explicit([0, 2]))
    assert c.intervals == ((1, 1), (3, None))
    assert complement(IntervalSet(((0, None),))).intervals == ()
    g = complement(squares(100))
    assert enumerate_up_to(g, 5) == [2, 3, 5]


def test_sets_equal_across_kinds():
    assert sets_equal(explicit([1, 2, 3]), IntervalSet(((1, 3),)))
    assert not sets_equal(explicit([1, 2]), IntervalSet(((1, 3),)))
    with pytest.raises(ValueError):
        sets_equal(squares(10), EMPTY)


def test_support_size_and_finiteness():
    assert support_size(EMPTY) == 0
    assert support_size(IntervalSet(((0, 4), (10, 10)))) == 6
    with pytest.raises(ValueError):
        support_size(IntervalSet(((0, None),)))
    with pytest.raises(ValueError):
        support_size(squares(10))


def test_contains_generator_horizon():
    s = squares(100)
    assert contains(s, 100)
    with pytest.raises(HorizonError):
        contains(s, 101)
    assert not contains(s, -3)


# --- generator enumeration cache


def test_generator_cache_extends_monotonically():
    s = squares(10**6)
    assert enumerate_up_to(s, 10) == [0, 1, 4, 9]
    assert enumerate_up_to(s, 5) == [0, 1, 4]
    assert enumerate_up_to(s, 30) == [0, 1, 4, 9, 16, 25]
    assert enumerate_up_to(s, 26) == [0, 1, 4, 9, 16, 25]


def test_generator_bad_enumerator_detected():
    g = GeneratorSet(lambda x: True, 100, lambda: iter([3, 3, 5]), label="bad")
    with pytest.raises(ValueError):
        enumerate_up_to(g, 10)


# --- .iset format


def test_iset_round_trip_explicit():
    a = explicit([1, 5, 9])
    text = format_iset(a)
    assert text == "1\n5\n9\n"
    assert parse_iset(text) == a


def test_iset_round_trip_intervals():
    a = IntervalSet(((0, 4), (7, 7), (10, 20)))
    back = parse_iset(format_iset(a))
    assert isinstance(back, IntervalSet) and back == a


def test_iset_comments_and_merging():
    a = parse_iset("# header\n1 4\n5 9  # adjacent merges\n")
    assert a.intervals == ((1, 9),)


def test_iset_rejects_unsorted_and_overlap():
    with pytest.raises(FormatError) as exc:
        parse_iset("5\n3\n")
    assert exc.value.line == 2
    with pytest.raises(FormatError) as exc:
        parse_iset("1 10\n5 20\n")
    assert exc.value.line == 2
    with pytest.raises(FormatError):
        parse_iset("1 2 3\n")
    with pytest.raises(FormatError):
        parse_iset("x\n")


def test_iset_cannot_serialize_unbounded_or_generator():
    with pytest.raises(ValueError):
        format_iset(IntervalSet(((0, None),)))
    with pytest.raises(ValueError):
        format_iset(squares(10))
