import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.muckenhoupt import (BracketError, CutoffCandidate, DegenerateError, Direction, HardyPair,
                                      StepCandidate, ZeroCandidate, a1_constant, a2_constant, best_constant_bracket,
                                      constant, empirical_max_ratio, hardy_sides, lemma_pairs, power_pair,
                                      verify_hardy)
from hardyrellich.profiles import DomainError, DomainSpec, omega_n, power_weight

W5 = omega_n(5)


def ones(s):
    return np.ones_like(np.asarray(s, dtype=float))


def test_classical_hardy_pair():
    hp = power_pair(-2.0, 0.0, math.inf, Direction.FROM_ZERO)
    assert a1_constant(hp) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(ValueError):
        a2_constant(hp)


@pytest.mark.parametrize("direction", [Direction.FROM_ZERO, Direction.FROM_A])
def test_unit_pair_on_unit_interval(direction):
    hp = power_pair(0.0, 0.0, 1.0, direction)
    assert constant(hp) == pytest.approx(0.25, rel=1e-9)
    lo, hi = best_constant_bracket(hp)
    assert (lo, hi) == pytest.approx((0.25, 0.5), rel=1e-9)
    assert best_constant_bracket(hp, upper_factor=4.0)[1] == pytest.approx(1.0, rel=1e-9)


def test_reversal_swaps_directions():
    hp = power_pair(1.0, 0.0, 1.0, Direction.FROM_ZERO)
    rev = hp.reversed()
    assert rev.direction is Direction.FROM_A
    # sup_t t (1 - t^2) / 2 at t = 1/sqrt(3)
    expected = 1 / (3 * math.sqrt(3))
    assert constant(hp) == pytest.approx(expected, rel=1e-9)
    assert constant(rev) == pytest.approx(expected, rel=1e-7)
    with pytest.raises(ValueError):
        power_pair(0.0, 0.0, math.inf, Direction.FROM_A).reversed()


@settings(max_examples=20, deadline=None)
@given(c=st.floats(1e-3, 1e3))
def test_scaling_in_u(c):
    hp = power_pair(0.5, 0.0, 2.0, Direction.FROM_A)
    assert constant(hp.scaled_u(c)) == pytest.approx(c * constant(hp), rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(alpha=st.floats(-0.9, 3.0), beta=st.floats(-3.0, 0.9))
def test_power_pairs_against_closed_form(alpha, beta):
    # FromZero on (0, 1): (int_t^1 s^alpha)(int_0^t s^-beta)
    hp = power_pair(alpha, beta, 1.0, Direction.FROM_ZERO)
    t = np.geomspace(1e-12, 1.0, 400_001)[:-1]
    tail = (1 - t ** (alpha + 1)) / (alpha + 1)
    head = t ** (1 - beta) / (1 - beta)
    assert constant(hp) == pytest.approx(float(np.max(tail * head)), rel=1e-7)


def test_infinite_constant_raises_bracket_error():
    hp = power_pair(-2.5, 0.0, math.inf, Direction.FROM_ZERO)
    assert math.isinf(constant(hp))
    with pytest.raises(BracketError):
        best_constant_bracket(hp)


def test_verify_hardy_cutoff_example():
    hp = power_pair(-2.0, 0.0, math.inf, Direction.FROM_ZERO)
    f = StepCandidate((0.0, 1.0, math.inf), (1.0, 0.0))
    # F = min(s, 1): int_0^1 1 ds + int_1^inf s^-2 ds = 2, against int f^2 = 1
    lhs, rhs, ok = verify_hardy(hp, f, 4.0)
    assert (lhs, rhs) == pytest.approx((2.0, 1.0), rel=1e-8) and ok
    assert not verify_hardy(hp, f, 1.0)[2]


def test_zero_and_degenerate_candidates():
    hp = power_pair(0.0, 0.0, 1.0, Direction.FROM_ZERO)
    assert hardy_sides(hp, ZeroCandidate()) == (0.0, 0.0)
    gap = HardyPair(ones, lambda s: np.where(np.asarray(s) < 0.5, 0.0, 1.0), 1.0, Direction.FROM_ZERO,
                    lambda s: np.where(np.asarray(s) < 0.5, math.inf, 1.0), breakpoints=(0.5,))
    with pytest.raises(DegenerateError):
        verify_hardy(gap, StepCandidate((0.0, 0.5, 1.0), (1.0, 0.0)), 1.0)


def test_empirical_ratio_inside_bracket():
    hp = power_pair(-2.0, 0.0, math.inf, Direction.FROM_ZERO)
    res = empirical_max_ratio(hp, n_candidates=80, seed=1)
    assert res.constant * (1 - 1e-6) <= res.max_ratio <= 4.0 * res.constant
    assert CutoffCandidate(1.0).breakpoints == [1.0]


def test_lemma_pairs_of_critical_power():
    first, second = lemma_pairs(power_weight(4), DomainSpec.fullspace(5))
    assert constant(first) == pytest.approx(W5 ** 0.8, rel=1e-6)
    # the FromA constant converges logarithmically in the grid floor
    assert constant(second) == pytest.approx(25 * W5 ** 0.8, rel=5e-3)
    assert constant(second) <= 25 * W5 ** 0.8 * (1 + 1e-9)


def test_lemma_pairs_scope():
    with pytest.raises(DomainError):
        lemma_pairs(power_weight(2), DomainSpec.ball(3, 1.0))
    with pytest.raises(DomainError):
        lemma_pairs(power_weight(2), DomainSpec.fullspace(4))


@settings(max_examples=20, deadline=None)
@given(alpha=st.floats(-0.9, 2.0), beta=st.floats(-2.0, 0.9), from_zero=st.booleans(), seed=st.integers(0, 100))
def test_random_pairs_ratio_within_muckenhoupt_bracket(alpha, beta, from_zero, seed):
    direction = Direction.FROM_ZERO if from_zero else Direction.FROM_A
    hp = power_pair(alpha, beta, 1.0, direction)
    if direction is Direction.FROM_A:
        hp = hp.reversed()  # keeps the same finite constant, now with a singular end at s = a
    res = empirical_max_ratio(hp, n_candidates=500, seed=seed)
    assert res.constant * (1 - 1e-3) <= res.max_ratio <= 4.0 * res.constant
