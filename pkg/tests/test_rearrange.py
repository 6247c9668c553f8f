import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize, special

from hardyrellich.profiles import (DomainSpec, constant_weight, omega_n, power_weight, shifted_power_weight,
                                   table_weight, zero_weight)
from hardyrellich.rearrange import (distribution, hardy_littlewood_gap, maximal, rearrangement, schwarz,
                                    schwarz_weight, star_values)

W5 = omega_n(5)


def test_distribution_examples():
    g1 = shifted_power_weight(0.9, 5)
    s = np.array([1.0, 3.0, 1e4])
    exact = W5 * np.expm1(5 * np.log1p(s ** (-1 / 0.9)))
    assert np.allclose(distribution(g1, DomainSpec.fullspace(5), s), exact, rtol=1e-10)
    assert distribution(constant_weight(2.0), DomainSpec.ball(3, 1.0), 2.0) == 0.0
    assert distribution(power_weight(4), DomainSpec.ball(5, 1.0), 16.0) == pytest.approx(W5 / 32, rel=1e-12)
    with pytest.raises(ValueError):
        distribution(power_weight(4), DomainSpec.ball(5, 1.0), 0.0)


def test_constant_and_zero():
    dom = DomainSpec.ball(3, 2.0)
    rp = rearrangement(constant_weight(1.5), dom)
    t = np.geomspace(1e-6, dom.measure * 0.999, 50)
    assert np.allclose(rp.star(t), 1.5) and np.allclose(rp.doublestar(t), 1.5)
    rz = rearrangement(zero_weight(), DomainSpec.fullspace(5))
    assert np.all(rz.star(t) == 0) and rz.integral == 0


def test_maximal_examples():
    dom = DomainSpec.ball(5, 1.0)
    rp = rearrangement(power_weight(2), dom)
    t = np.array([1e-6, 0.1, 3.0])
    assert np.allclose(maximal(rp, t), 5 / 3 * (W5 / t) ** 0.4, rtol=1e-9)


def test_schwarz_examples():
    dom = DomainSpec.ball(5, 1.0)
    rp = rearrangement(power_weight(3), dom)
    r = np.array([0.1, 0.5, 0.9])
    assert np.allclose(schwarz(rp, dom, r), r ** -3.0, rtol=1e-10)
    g1 = shifted_power_weight(0.9, 5)
    full = DomainSpec.fullspace(5)
    sym = schwarz(rearrangement(g1, full), full, r)
    assert np.allclose(sym, np.expm1(np.log1p(r ** 5) / 5) ** -0.9, rtol=1e-8)
    sw = schwarz_weight(rearrangement(constant_weight(2.0), dom), dom)
    assert np.allclose(sw(r), 2.0)


def test_hardy_littlewood_gap():
    dom = DomainSpec.ball(5, 2.0)
    f = power_weight(1)
    g = table_weight([0.0, 2.0], [2.0, 0.0])
    assert abs(hardy_littlewood_gap(f, g, dom)) < 1e-8
    assert abs(hardy_littlewood_gap(constant_weight(1.0), g, dom)) < 1e-8
    # increasing g against decreasing f: the gap is the exact difference of two integrals
    h = table_weight([0.0, 2.0], [0.0, 2.0])
    gap = hardy_littlewood_gap(f, h, dom)
    # 32 omega_5 (B(4/5, 6/5) - 1)
    assert gap == pytest.approx(32 * W5 * (special.beta(0.8, 1.2) - 1), rel=1e-9)
    assert gap > 0


def test_star_values_match_profile():
    g1 = shifted_power_weight(0.9, 5)
    dom = DomainSpec.fullspace(5)
    t = np.geomspace(1e-3, 100.0, 7)
    assert np.allclose(star_values(g1, dom, t), rearrangement(g1, dom).star(t), rtol=1e-12)


tables = st.lists(st.floats(0.0, 10.0), min_size=3, max_size=12).map(
    lambda v: table_weight(np.linspace(0.0, 1.0, len(v)), v))


@settings(max_examples=15, deadline=None)
@given(w=tables, n=st.integers(1, 5))
def test_profile_invariants(w, n):
    dom = DomainSpec.ball(n, 1.0)
    rp = rearrangement(w, dom)
    t = np.geomspace(1e-9, dom.measure * 0.999, 200)
    star, dstar = rp.star(t), rp.doublestar(t)
    tol = 1e-9 * max(1.0, float(np.max(star)))
    assert np.all(np.diff(star) <= tol)
    assert np.all(np.diff(dstar) <= tol)
    assert np.all(dstar >= star - tol)
    # t g**(t) = int_0^t g*
    for x in (0.1 * dom.measure, 0.6 * dom.measure):
        ref = integrate.quad(lambda s: rp.star(np.array([s]))[0], 0.0, x, limit=200,
                             points=[b for b in rp.breakpoints if b < x])[0]
        assert rp.primitive(np.array([x]))[0] == pytest.approx(ref, rel=1e-8, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(w=tables)
def test_equimeasurability(w):
    dom = DomainSpec.ball(3, 1.0)
    rp = rearrangement(w, dom)
    vmax = float(np.max(w(np.linspace(0, 1, 2001))))
    if vmax <= 0:
        return
    rng = np.random.default_rng(0)
    for s in rng.uniform(0.01 * vmax, 0.99 * vmax, 50):
        direct = distribution(w, dom, s)
        if direct == 0.0:
            continue
        lo, hi = 1e-14, min(rp.support, dom.measure) * (1 - 1e-14)
        if rp.star(np.array([hi]))[0] > s:
            from_star = hi
        else:
            from_star = optimize.brentq(lambda x: rp.star(np.array([x]))[0] - s, lo, hi, xtol=1e-15, rtol=1e-14)
        assert from_star == pytest.approx(direct, rel=1e-6)


def test_brute_force_sort_oracle():
    rng = np.random.default_rng(3)
    n, cells = 3, 300
    edges = np.linspace(0.0, 1.0, cells + 1)
    vals = np.abs(np.cumsum(rng.normal(size=cells + 1)))
    w = table_weight(edges, vals)
    mid = 0.5 * (edges[1:] + edges[:-1])
    vol = omega_n(n) * np.diff(edges ** n)
    cell_vals = w(mid)
    order = np.argsort(-cell_vals)
    t_end = np.cumsum(vol[order])
    osc = np.max(np.abs(np.diff(vals)))
    rp = rearrangement(w, DomainSpec.ball(n, 1.0))
    t_mid = t_end - 0.5 * vol[order]
    assert np.max(np.abs(rp.star(t_mid) - cell_vals[order])) <= osc


@settings(max_examples=10, deadline=None)
@given(a=st.lists(st.floats(0.0, 5.0), min_size=6, max_size=6), b=st.lists(st.floats(0.0, 5.0), min_size=6, max_size=6))
def test_maximal_subadditive(a, b):
    radii = np.linspace(0.0, 1.0, 6)
    dom = DomainSpec.ball(4, 1.0)
    f, g = table_weight(radii, a), table_weight(radii, b)
    fg = table_weight(radii, np.add(a, b))
    t = np.random.default_rng(1).uniform(1e-6, dom.measure, 50)
    lhs = rearrangement(fg, dom).doublestar(t)
    rhs = rearrangement(f, dom).doublestar(t) + rearrangement(g, dom).doublestar(t)
    assert np.all(lhs <= rhs * (1 + 1e-9) + 1e-12)
