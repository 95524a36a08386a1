import cmath
import math
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from siegel_theta.characteristics import FracVector, canonical, enumerate_half_chars
from siegel_theta.points import SiegelPoint
from siegel_theta.symplectic import act_on_H, rotation
from siegel_theta.theta import (
    DegenerateFamilyError,
    LogValue,
    TruncationError,
    _lattice_sum,
    big_theta,
    big_theta_log,
    check_sp_action,
    is_vanishing_char,
    log_relative_residual,
    prefactor_phase,
    theta,
    theta_exponents,
)
from siegel_theta.verify import random_gamma_N, random_index, random_word


def theta_oracle(v, Z, K=12):
    """Plain loop over the box |n_i| <= K."""
    v = [float(x) for x in v]
    g = len(Z)
    a, b = np.array(v[:g]), np.array(v[g:])
    total = 0j
    for n in product(range(-K, K + 1), repeat=g):
        x = np.array(n) + a
        total += cmath.exp(1j * math.pi * (x @ Z @ x) + 2j * math.pi * (x @ b))
    return total


def test_theta_null_at_i():
    tv = theta((0, 0), SiegelPoint([[1j]]))
    want = sum(math.exp(-math.pi * n * n) for n in range(-20, 21))
    assert abs(tv.value - want) < 1e-12
    assert abs(tv.value - 1.0864348112) < 1e-10
    assert tv.tail_bound < 1e-12


def test_odd_characteristic_is_exactly_zero():
    for tau in (1j, 0.3 + 0.8j):
        assert theta(("1/2", "1/2"), SiegelPoint([[tau]])).value == 0


def test_diagonal_factorization():
    t1, t2 = 0.1 + 1.1j, -0.3 + 0.9j
    lhs = theta((0, 0, 0, 0), SiegelPoint.diag([t1, t2])).value
    rhs = theta((0, 0), SiegelPoint([[t1]])).value * theta((0, 0), SiegelPoint([[t2]])).value
    assert abs(lhs - rhs) < 1e-12


@pytest.mark.parametrize("v", ["1/3,0,0,2/3", "1/5,-2/5,1/2,0", "0,0,0,0", "7/3,1/4,1/6,5/7"])
def test_theta_matches_box_oracle(v, rng):
    Z = SiegelPoint.random(2, rng)
    got = theta(FracVector(v), Z).value
    assert abs(got - theta_oracle(FracVector(v), Z.Z)) < 1e-11


def test_tail_bound_is_honest(rng):
    # doubling the radius moves the sum by less than the reported tail
    for _ in range(100):
        g = int(rng.integers(1, 4))
        Z = SiegelPoint.random(g, rng)
        Z = SiegelPoint(Z.X + 1j * Z.Y * 0.5)   # lambda_min >= 1/2
        v = random_index(g, int(rng.integers(2, 8)), rng).rep
        tv = theta(v, Z, use_criterion=False)
        u = [float(F(x) + F(1, 2) - math.floor(F(x) + F(1, 2))) - 0.5 for x in v.entries[:g]]
        b = [float(x) for x in v.entries[g:]]
        wide = _lattice_sum(np.array(u), np.array(b), Z, 2 * tv.radius)
        assert abs(wide - tv.value) <= tv.tail_bound
        assert tv.tail_bound < 1e-12


def test_truncation_error_carries_bound():
    Z = SiegelPoint([[0.01j]])
    with pytest.raises(TruncationError) as info:
        theta((0, 0), Z, radius_cap=2.0)
    assert info.value.achieved_bound > 1e-12


def test_input_validation():
    with pytest.raises(ValueError):
        theta((0, 0), SiegelPoint(1j * np.eye(2)))
    with pytest.raises(ValueError):
        theta((0, 0), SiegelPoint([[1j]]), eps=0)
    with pytest.raises(ValueError):
        SiegelPoint([[1j, 0], [1, 1j]])
    with pytest.raises(ValueError):
        SiegelPoint([[-1j]])


@pytest.mark.parametrize("v,want", [
    ("1/2,0,1/2,0", True), ("1/2,0,0,0", False), ("1/3,0,0,0", False), ("3/2,1/2", True),
])
def test_is_vanishing_char(v, want):
    assert is_vanishing_char(FracVector(v)) is want


@pytest.mark.parametrize("g", [1, 2])
def test_vanishing_dichotomy(g, rng):
    minus, plus = enumerate_half_chars(g)
    pts = [SiegelPoint.random(g, rng) for _ in range(3)]
    for a in minus + plus:
        small = all(abs(theta(a.vector, Z, use_criterion=False).value) < 1e-10 for Z in pts)
        assert small == is_vanishing_char(a.vector)


def test_log_value_round_trip():
    for w in (1 + 1j, -3e-5 + 2e-5j, 7.0):
        assert abs(LogValue.of(w).to_complex() - w) <= 1e-12 * abs(w)
    assert LogValue.of(0).to_complex() == 0
    a = LogValue(1.0, 0.5)
    assert log_relative_residual(a, LogValue(1.0, 0.5 + 2 * math.pi)) < 1e-15
    assert log_relative_residual(LogValue(-math.inf, 0), LogValue(-math.inf, 0)) == 0


def test_exponents_and_prefactor():
    assert theta_exponents(2, 3) == (60, 36)
    v = FracVector("1/3,2/3,1/3,1/3")
    # e(-180 v_u^T v_l) with v_u^T v_l = 1/3
    assert prefactor_phase(v, 3) == 0
    assert prefactor_phase(FracVector("1/5,0,1/5,0"), 5) == F(0)
    assert prefactor_phase(FracVector("1/7,0,1/7,0"), 7) == F(-4 * 7 * 3 * 5, 49) % 1


def test_big_theta_rejects_level_two():
    with pytest.raises(DegenerateFamilyError, match="becomes identically zero when N=2"):
        big_theta(FracVector("1/2,0"), SiegelPoint([[1j]]))


def test_big_theta_genus1_example():
    from siegel_theta.genus1 import siegel_g
    bt = big_theta_log(FracVector("1/3,0"), SiegelPoint([[1j]]))
    assert log_relative_residual(bt, siegel_g((F(1, 3), 0), 1j).log ** 36) < 1e-6


def test_big_theta_pm_symmetry(rng):
    v = random_index(2, 5, rng).rep
    for _ in range(5):
        Z = SiegelPoint.random(2, rng)
        assert log_relative_residual(big_theta_log(-v, Z), big_theta_log(v, Z)) < 1e-8
        assert log_relative_residual(big_theta_log(v + FracVector([1, -2, 0, 3]), Z),
                                     big_theta_log(v, Z)) < 1e-8


@given(st.lists(st.integers(0, 6), min_size=4, max_size=4), st.integers(0, 2**31))
def test_theta_pm_magnitude(residues, seed):
    v = FracVector([F(r, 7) for r in residues])
    Z = SiegelPoint.random(2, np.random.default_rng(seed))
    assert abs(abs(theta(v, Z).value) - abs(theta(-v, Z).value)) < 1e-11


def test_check_sp_action_examples(rng):
    v = random_index(2, 5, rng)
    Z = SiegelPoint.random(2, rng)
    assert check_sp_action(np.eye(4, dtype=np.int64), v, Z) < 1e-12
    assert check_sp_action(rotation(2), v, Z) < 1e-6
    # rotation against the explicit index (v_l; -v_u)
    u, l = v.rep.entries[:2], v.rep.entries[2:]
    w = canonical(list(l) + [-x for x in u])
    r = log_relative_residual(big_theta_log(v, act_on_H(rotation(2), Z)), big_theta_log(w, Z))
    assert r < 1e-6
    G = random_gamma_N(2, 5, rng)
    assert check_sp_action(G, v, Z) < 1e-6


def test_check_sp_action_words(rng):
    for _ in range(20):
        M = random_word(2, rng)
        assert check_sp_action(M, random_index(2, 5, rng), SiegelPoint.random(2, rng)) < 1e-6


def test_check_sp_action_needs_nu_one():
    from siegel_theta.symplectic import similitude_diag
    with pytest.raises(ValueError):
        check_sp_action(similitude_diag(2, -1), FracVector("1/3,0,0,0"), SiegelPoint(1j * np.eye(2)))


def test_degenerate_evaluation_is_zero(rng):
    Z = SiegelPoint.random(2, rng)
    lv = big_theta_log(FracVector("1/2,0,0,0"), Z, allow_degenerate=True)
    assert lv.log_magnitude < math.log(1e-10)
