import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.norms import (Family, SpaceSpec, critical_pair, evaluate, from_decreasing, lebesgue_norm,
                                lorentz_norm, lorentz_quasinorm, lorentz_zygmund_quasinorm, membership,
                                mlogl_norm)
from hardyrellich.profiles import DomainSpec, constant_weight, omega_n, power_weight, table_weight, zero_weight
from hardyrellich.rearrange import rearrangement

W5 = omega_n(5)
BALL = DomainSpec.ball(5, 1.0)


@pytest.fixture(scope="module")
def const_profile():
    return rearrangement(constant_weight(2.0), BALL)


@pytest.mark.parametrize("p, q", [(1.0, 1.0), (2.0, 1.0), (1.5, 3.0), (4.0, 2.0)])
def test_lorentz_of_constant(const_profile, p, q):
    expected = 2.0 * (p / q) ** (1 / q) * W5 ** (1 / p)
    assert lorentz_quasinorm(const_profile, p, q) == pytest.approx(expected, rel=1e-9)


def test_weak_and_lebesgue_of_constant(const_profile):
    assert lorentz_quasinorm(const_profile, 1.25, math.inf) == pytest.approx(2.0 * W5 ** 0.8, rel=1e-9)
    assert lebesgue_norm(const_profile, 3.0) == pytest.approx(2.0 * W5 ** (1 / 3), rel=1e-9)
    assert lebesgue_norm(const_profile, math.inf) == pytest.approx(2.0)


def test_critical_lorentz_zygmund_of_constant(const_profile):
    # int_0^a (1/log(ea/t))^2 dt/t = 1
    assert lorentz_zygmund_quasinorm(const_profile, math.inf, 2.0, -1.0) == pytest.approx(2.0, rel=1e-8)
    with_max, plain = critical_pair(const_profile)
    assert plain == pytest.approx(4.0, rel=1e-8) and with_max == pytest.approx(4.0, rel=1e-8)


def test_mlogl_of_constant(const_profile):
    # sup_t t log(a/t) c = c a / e
    assert mlogl_norm(const_profile) == pytest.approx(2.0 * W5 / math.e, rel=1e-9)


def test_zero_weight_norms():
    rz = rearrangement(zero_weight(), BALL)
    for spec in (SpaceSpec(Family.LORENTZ, 1.25, math.inf), SpaceSpec(Family.MLOGL, reference_measure=W5),
                 SpaceSpec(Family.LORENTZ_ZYGMUND, math.inf, 2.0, -1.0, W5), SpaceSpec(Family.LEBESGUE, 2.0)):
        assert evaluate(rz, spec) == 0.0


@pytest.mark.parametrize("alpha, member", [(3.0, True), (4.0, True), (4.5, False)])
def test_weak_membership_on_ball(alpha, member):
    rp = rearrangement(power_weight(alpha), BALL)
    ok, value = membership(rp, SpaceSpec.weak(1.25))
    assert ok is member
    if member:
        # sup_t t^(4/5) (omega/t)^(alpha/5) attained at t = |ball|
        assert value == pytest.approx(W5 ** 0.8, rel=1e-8)


@pytest.mark.parametrize("alpha, member", [(3.0, False), (4.0, True), (4.5, False)])
def test_weak_membership_on_fullspace(alpha, member):
    rp = rearrangement(power_weight(alpha), DomainSpec.fullspace(5))
    ok, value = membership(rp, SpaceSpec.weak(1.25))
    assert ok is member
    if member:
        assert value == pytest.approx(W5 ** 0.8, rel=1e-8)


def test_space_validation():
    with pytest.raises(ValueError):
        SpaceSpec(Family.MLOGL)
    with pytest.raises(ValueError):
        SpaceSpec(Family.LORENTZ, 0.5, 2.0)
    rp = rearrangement(constant_weight(1.0), DomainSpec.fullspace(3))
    with pytest.raises(ValueError):
        lorentz_zygmund_quasinorm(rp, math.inf, 2.0, -1.0)
    with pytest.raises(ValueError):
        lorentz_quasinorm(rp, math.inf, 2.0)
    assert SpaceSpec(Family.LORENTZ, 1.25, math.inf, maximal=True).label == "L^(1.25,inf)**"


def test_from_decreasing_matches_rearrangement():
    rp = from_decreasing(lambda t: np.maximum(1.0 - t / 2.0, 0.0), 2.0)
    # int_0^2 (1 - t/2)^2 dt = 2/3
    assert lebesgue_norm(rp, 2.0) == pytest.approx(math.sqrt(2 / 3), rel=1e-10)


tables = st.lists(st.floats(0.0, 10.0), min_size=3, max_size=8).map(
    lambda v: table_weight(np.linspace(0.0, 1.0, len(v)), v))


@settings(max_examples=10, deadline=None)
@given(w=tables, p=st.floats(1.0, 4.0))
def test_diagonal_lorentz_is_lebesgue(w, p):
    rp = rearrangement(w, DomainSpec.ball(3, 1.0))
    assert lorentz_quasinorm(rp, p, p) == pytest.approx(lebesgue_norm(rp, p), rel=1e-9, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(w=tables, c=st.floats(0.01, 100.0))
def test_homogeneity(w, c):
    dom = DomainSpec.ball(3, 1.0)
    rp, rc = rearrangement(w, dom), rearrangement(w.scaled(c), dom)
    for fn in (lambda r: lorentz_quasinorm(r, 1.5, 2.0), lambda r: lorentz_quasinorm(r, 1.5, math.inf),
               mlogl_norm, lambda r: lorentz_zygmund_quasinorm(r, math.inf, 2.0, -1.0)):
        assert fn(rc) == pytest.approx(c * fn(rp), rel=1e-7, abs=1e-10)


@settings(max_examples=10, deadline=None)
@given(w=tables, p=st.floats(1.1, 4.0), q=st.sampled_from([1.0, 2.0, math.inf]))
def test_maximal_norm_dominates(w, p, q):
    rp = rearrangement(w, DomainSpec.ball(4, 1.0))
    assert lorentz_norm(rp, p, q) >= lorentz_quasinorm(rp, p, q) * (1 - 1e-9)
