from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, strategies as st

from siegel_theta.characteristics import (
    DimensionError,
    FracVector,
    HALF,
    canonical,
    coordinate_counts,
    count_I_N,
    enumerate_half_chars,
    enumerate_I_N,
    frac_part,
    half_parity,
    has_half_integral_pair,
    iter_I_N,
    n_counts,
    split,
    target_vector,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def vec(*xs):
    return FracVector([F(x) for x in xs])


@pytest.mark.parametrize("x,want", [(0, 0), (F(-1, 3), F(2, 3)), (F(7, 5), F(2, 5)), (3, 0)])
def test_frac_part_examples(x, want):
    assert frac_part(x) == want


@given(rationals)
def test_frac_part_range_and_congruence(x):
    y = frac_part(x)
    assert 0 <= y < 1
    assert (x - y).denominator == 1


def test_split_examples():
    assert split(vec("1/3", 0, 0, "2/3")) == ((F(1, 3), F(0)), (F(0), F(2, 3)))
    u, l = split(target_vector("e", 2, 5))
    assert u == l == (F(1, 5), F(1, 5))
    assert split(target_vector("f", 3, 7))[1] == (0, 0, 0)


def test_split_odd_dimension():
    with pytest.raises(DimensionError):
        split(vec(1, 2, 3))


def test_parse_round_trip_and_errors():
    v = FracVector.parse("1/3, 0,0 ,2/3")
    assert v == vec("1/3", 0, 0, "2/3")
    assert FracVector.parse(str(v)) == v
    with pytest.raises(ValueError, match="position 4"):
        FracVector.parse("1/3,x,0")
    with pytest.raises(ValueError, match="position 0"):
        FracVector.parse("1/0,0")


def test_float_entries_rejected():
    with pytest.raises(TypeError):
        FracVector([0.5, 0])


def test_level_is_exact_denominator():
    assert vec("1/3", "1/2", 0, 0).level == 6
    assert vec("5/3", 0).level == 3
    assert vec(1, 2).level == 1


@pytest.mark.parametrize("v,rep", [
    (("2/3", 0, 0, 0), ("1/3", 0, 0, 0)),
    (("1/5", 0, 0, 0), ("1/5", 0, 0, 0)),
    (("1/3", "2/3", 0, 0), ("1/3", "2/3", 0, 0)),
])
def test_canonical_examples(v, rep):
    assert canonical(vec(*v)).rep == vec(*rep)


@given(st.lists(rationals, min_size=4, max_size=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_canonical_invariances(xs, shift):
    v = FracVector(xs)
    c = canonical(v)
    assert canonical(c.rep) == c
    assert canonical(-v) == c
    assert canonical(v + FracVector(shift)) == c


@pytest.mark.parametrize("g,N,count", [(1, 2, 3), (2, 3, 40), (2, 5, 312), (1, 6, 12), (2, 4, 120)])
def test_enumerate_counts(g, N, count):
    classes = enumerate_I_N(g, N)
    assert len(classes) == count == count_I_N(g, N)


def test_enumerate_g1_N2_members():
    reps = {str(c) for c in enumerate_I_N(1, 2)}
    assert reps == {"1/2,0", "0,1/2", "1/2,1/2"}


@pytest.mark.parametrize("g,N", [(1, 5), (1, 8), (2, 3), (2, 6), (3, 3)])
def test_enumerate_reps_distinct_with_exact_level(g, N):
    classes = enumerate_I_N(g, N)
    assert len({c.rep for c in classes}) == len(classes)
    assert all(c.rep.level == N and c.level == N for c in classes)
    assert all(canonical(c.rep) == c for c in classes)


def test_enumerate_brute_force_oracle():
    # every vector of exact denominator 6 lands in exactly one class
    g, N = 1, 6
    seen = set()
    for r in product(range(N), repeat=2 * g):
        v = FracVector(F(x, N) for x in r)
        if v.level == N:
            seen.add(canonical(v))
    assert seen == set(enumerate_I_N(g, N))


def test_enumerate_rejects_small_level():
    with pytest.raises(ValueError):
        enumerate_I_N(2, 1)


def test_large_enumeration_is_lazy():
    it = enumerate_I_N(4, 8)   # 8^8 > 1e7 raw vectors
    assert not isinstance(it, list)
    assert next(iter(it)).level == 8
    assert next(iter_I_N(1, 3)).level == 3


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_half_char_counts(g):
    minus, plus = enumerate_half_chars(g)
    assert len(minus) == 2 ** (g - 1) * (2**g - 1)
    assert len(plus) == 2 ** (g - 1) * (2**g + 1)
    assert len(minus) + len(plus) == 4**g
    assert all(a.parity == -1 for a in minus) and all(b.parity == 1 for b in plus)


def test_half_char_examples():
    minus, plus = enumerate_half_chars(1)
    assert [a.entries for a in minus] == [(HALF, HALF)]
    assert len(plus) == 3
    minus2, _ = enumerate_half_chars(2)
    assert (HALF, 0, HALF, 0) in {a.entries for a in minus2}
    assert half_parity((HALF, 0, HALF, 0)) == -1
    assert half_parity((HALF, 0, 0, 0)) == 1
    with pytest.raises(ValueError):
        half_parity((F(1, 3), 0))


@pytest.mark.parametrize("g,want", [(1, (0, 1)), (2, (2, 4)), (3, (12, 16))])
def test_n_counts_examples(g, want):
    assert n_counts(g) == want


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_n_counts_match_coordinate_census(g):
    n0, nh = n_counts(g)
    assert coordinate_counts(g) == [(n0, nh)] * (2 * g)


def test_targets_and_half_pairs():
    assert target_vector("e_3", 2, 5) == vec(0, 0, "1/5", 0)
    assert target_vector("f", 2, 3) == vec("1/3", "1/3", 0, 0)
    with pytest.raises(ValueError):
        target_vector("e9", 2, 3)
    assert has_half_integral_pair(vec("1/2", "1/3", 0, "1/3"))
    assert not has_half_integral_pair(vec("1/2", "1/3", "1/3", 0))
