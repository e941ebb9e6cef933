"""Ideal-level operations: exceedance sets, convergence, pseudo-union,
separating witness."""

import math
import random
from fractions import Fraction

import pytest

from windensity.density import TrendPolicy, VerdictKind, member_verdict
from windensity.errors import EvaluationRangeError, FormatError, PseudoUnionError
from windensity.families import classical_prefix, factorial_blocks, family_union
from windensity.idealops import (
    CharacteristicSequence,
    ConstantSequence,
    FileSequence,
    ReciprocalSequence,
    evaluate,
    exceedance_set,
    i_converges,
    parse_seq,
    pseudo_union,
    separating_witness,
)
from windensity.sets import (
    EMPTY,
    GeneratorSet,
    IntervalSet,
    enumerate_up_to,
    explicit,
    restrict,
    set_difference,
    sets_equal,
)

CL = classical_prefix()
FB = factorial_blocks()


def squares(h=1 << 18):
    return GeneratorSet(
        lambda x: math.isqrt(x) ** 2 == x, h, lambda: (i * i for i in range(1 << 10)),
        label="squares",
    )


def cubes(h=1 << 18):
    def icbrt(x):
        r = round(x ** (1 / 3)) if x else 0
        while (r + 1) ** 3 <= x:
            r += 1
        while r**3 > x:
            r -= 1
        return r

    return GeneratorSet(
        lambda x: icbrt(x) ** 3 == x, h, lambda: (i**3 for i in range(1 << 7)),
        label="cubes",
    )


# --- sequences


def test_evaluate():
    assert evaluate(ReciprocalSequence(), 0) == 1
    assert evaluate(ReciprocalSequence(), 9) == Fraction(1, 10)
    assert evaluate(CharacteristicSequence(explicit([3])), 3) == 1
    assert evaluate(CharacteristicSequence(explicit([3])), 4) == 0
    assert evaluate(ConstantSequence(Fraction(2, 7)), 123) == Fraction(2, 7)
    fs = FileSequence((Fraction(1), Fraction(1, 2)))
    assert evaluate(fs, 1) == Fraction(1, 2)
    with pytest.raises(EvaluationRangeError):
        evaluate(fs, 2)
    with pytest.raises(EvaluationRangeError):
        evaluate(fs, -1)


def test_parse_seq():
    fs = parse_seq("1/2\n3\n# comment\n0.25\n")
    assert fs.values == (Fraction(1, 2), Fraction(3), Fraction(1, 4))
    with pytest.raises(FormatError) as exc:
        parse_seq("1/2\nbogus\n")
    assert exc.value.line == 2


# --- exceedance sets


def test_exceedance_spec_values():
    e = exceedance_set(ReciprocalSequence(), Fraction(0), Fraction(1, 10), horizon=100)
    assert sets_equal(e, IntervalSet(((0, 9),)))
    carrier = explicit([2, 5, 9, 40])
    e = exceedance_set(CharacteristicSequence(carrier), Fraction(0), Fraction(1, 2), horizon=10)
    assert sets_equal(e, explicit([2, 5, 9]))
    e = exceedance_set(ConstantSequence(Fraction(0)), Fraction(0), Fraction(1, 3))
    assert sets_equal(e, EMPTY)
    with pytest.raises(ValueError):
        exceedance_set(ReciprocalSequence(), Fraction(0), Fraction(0))


def test_exceedance_closed_form_matches_pointwise():
    rng = random.Random(99)
    seqs = [
        ReciprocalSequence(),
        ConstantSequence(Fraction(1, 3)),
        CharacteristicSequence(explicit(rng.sample(range(0, 200), 25))),
    ]
    for seq in seqs:
        for _ in range(20):
            limit = Fraction(rng.randrange(-2, 3), rng.randrange(1, 5))
            eps = Fraction(rng.randrange(1, 8), rng.randrange(8, 30))
            direct = {k for k in range(201) if abs(evaluate(seq, k) - limit) >= eps}
            got = set(enumerate_up_to(exceedance_set(seq, limit, eps, horizon=200), 200))
            assert got == direct


def test_exceedance_infinite_structure_preserved():
    wit = family_union(FB)
    e = exceedance_set(CharacteristicSequence(wit), Fraction(0), Fraction(1, 2))
    assert e is wit  # identity preserved, provenance intact
    comp = exceedance_set(CharacteristicSequence(wit), Fraction(1), Fraction(1, 2))
    assert enumerate_up_to(comp, 10) == [0, 5, 10]


def test_exceedance_file_sequence():
    fs = FileSequence(tuple(Fraction(1, k + 1) for k in range(50)))
    e = exceedance_set(fs, Fraction(0), Fraction(1, 10), horizon=49)
    assert e.elements == tuple(range(10))
    with pytest.raises(EvaluationRangeError):
        exceedance_set(fs, Fraction(0), Fraction(1, 10), horizon=50)
    with pytest.raises(EvaluationRangeError):
        exceedance_set(fs, Fraction(0), Fraction(1, 10))


# --- convergence


def test_reciprocal_converges_under_both_families():
    eps = [Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)]
    for fam in (CL, FB):
        rep = i_converges(fam, ReciprocalSequence(), Fraction(0), eps)
        assert rep.converges
        assert all(v.kind is VerdictKind.MEMBER_EXACT for _, v in rep.items)


def test_block_union_characteristic_not_convergent_under_blocks():
    rep = i_converges(
        FB, CharacteristicSequence(family_union(FB)), Fraction(0), [Fraction(1, 2)]
    )
    assert not rep.converges
    assert rep.items[0][1].kind is VerdictKind.NON_MEMBER_EXACT
    assert rep.bottleneck == Fraction(1, 2)


def test_block_union_characteristic_statistically_convergent():
    # under the classical family the same sequence converges; the default
    # doubling schedule starts too early for its first maxima step, so the
    # trend window is anchored at k_from=6 (exact ratios then stay <= 3/4)
    policy = TrendPolicy(k_from=6, k_to=16)
    rep = i_converges(
        CL,
        CharacteristicSequence(family_union(FB)),
        Fraction(0),
        [Fraction(1, 2), Fraction(1, 10)],
        policy,
    )
    assert rep.converges
    assert all(v.kind is VerdictKind.TREND_MEMBER for _, v in rep.items)


def test_characteristic_verdicts_match_member_verdicts():
    rng = random.Random(20240802)
    for _ in range(100):
        xs = frozenset(rng.sample(range(0, 400), rng.randrange(1, 30)))
        a = explicit(xs)
        eps = Fraction(rng.randrange(1, 100), 100)
        rep = i_converges(CL, CharacteristicSequence(a), Fraction(0), [eps])
        assert rep.items[0][1].kind == member_verdict(CL, a).kind


def test_converge_empty_epsilons_rejected():
    with pytest.raises(ValueError):
        i_converges(CL, ReciprocalSequence(), Fraction(0), [])


# --- pseudo-union


def test_pseudo_union_finite_members():
    members = [explicit(range(1, 11)), explicit(range(5, 21))]
    res = pseudo_union(CL, members)
    assert res.thresholds[0] == 0
    assert res.tolerances == (Fraction(1), Fraction(1, 2))
    for member, n_i in zip(members, res.thresholds):
        left = set_difference(member, res.union_set)
        elems = enumerate_up_to(left, 100)
        assert all(x <= n_i for x in elems)


def test_pseudo_union_squares_cubes():
    res = pseudo_union(CL, [squares(), cubes()])
    assert res.thresholds == (0, 1)
    for member, n_i in zip((squares(), cubes()), res.thresholds):
        left = set_difference(restrict(member, 1 << 14), res.union_set)
        elems = enumerate_up_to(left, 1 << 14)
        assert all(x <= n_i for x in elems)


def test_pseudo_union_monotone_in_tolerance():
    members = [explicit(range(1, 11)), explicit(range(5, 21)), explicit(range(9, 60))]
    tight = pseudo_union(CL, members, tol_schedule=lambda i: Fraction(1, 2 ** (i + 2)))
    loose = pseudo_union(CL, members, tol_schedule=lambda i: Fraction(1, 2**i))
    assert all(l <= t for l, t in zip(loose.thresholds, tight.thresholds))


def test_pseudo_union_failure_reported():
    with pytest.raises(PseudoUnionError) as exc:
        pseudo_union(
            FB,
            [family_union(FB)],
            tol_schedule=lambda i: Fraction(1, 2 ** (i + 1)),
            m_grid=[0, 2, 8, 64, 1024],
            scan_horizon=12,
        )
    assert exc.value.member == 0


def test_pseudo_union_trivial_tolerance_succeeds_vacuously():
    res = pseudo_union(FB, [family_union(FB)], m_grid=[0, 2], scan_horizon=8)
    assert res.thresholds == (0,)  # tol(0) = 1 admits anything


# --- separating witness


def test_separating_witness_report():
    wit, rep = separating_witness()
    assert all(v == 1 for v in rep.mu_under_blocks.values)
    assert len(rep.mu_under_blocks.samples) == 20
    expected = [
        (1, 1, Fraction(1)),
        (2, 2, Fraction(1)),
        (3, 6, Fraction(5, 6)),
        (4, 24, Fraction(3, 8)),
        (5, 120, Fraction(7, 60)),
        (6, 720, Fraction(1, 36)),
        (7, 5040, Fraction(27, 5040)),
        (8, 40320, Fraction(1, 1152)),
        (9, 362880, Fraction(11, 90720)),
        (10, 3628800, Fraction(1, 67200)),
    ]
    assert list(rep.prefix_densities) == expected
    dens = [d for _, _, d in rep.prefix_densities]
    assert all(a > b for a, b in zip(dens[2:], dens[3:]))  # strictly decreasing n=3..10
    assert enumerate_up_to(wit, 30) == [1, 2, 3, 4, 6, 7, 8, 9, 24, 25, 26, 27, 28]


def test_separating_witness_verdicts_disagree():
    wit, _ = separating_witness()
    assert member_verdict(FB, wit).kind is VerdictKind.NON_MEMBER_EXACT
    policy = TrendPolicy(k_from=6, k_to=16)
    assert member_verdict(CL, wit, policy).kind is VerdictKind.TREND_MEMBER
