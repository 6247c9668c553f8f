import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.profiles import (DomainError, DomainSpec, NotFoundError, catalog_lookup, catalog_names,
                                   Piece, RadialWeight, load_weight_config, omega_n, parse_name, power_weight, read_table_csv,
                                   shifted_power_weight, table_weight)


@pytest.mark.parametrize("n, expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3), (4, math.pi ** 2 / 2)])
def test_omega(n, expected):
    assert omega_n(n) == pytest.approx(expected, rel=1e-14)


def test_domain_measures():
    assert DomainSpec.ball(5, 2.0).measure == pytest.approx(omega_n(5) * 32)
    assert math.isinf(DomainSpec.fullspace(3).measure)
    assert math.isinf(DomainSpec.exterior(4).measure)
    assert DomainSpec.annulus(4, 2.0).measure == pytest.approx(omega_n(4) * 15)
    assert DomainSpec.exterior(3, 3.0).measure == pytest.approx(omega_n(3) * 26)


@pytest.mark.parametrize("bad", [lambda: DomainSpec.exterior(4, 1.0), lambda: DomainSpec.annulus(4, 0.5),
                                 lambda: DomainSpec.ball(3, 0.0), lambda: DomainSpec.ball(0, 1.0)])
def test_domain_validation(bad):
    with pytest.raises(DomainError):
        bad()


def test_symmetrized_domain_keeps_measure():
    dom = DomainSpec.annulus(4, 2.0)
    sym = dom.symmetrized()
    assert sym.measure == pytest.approx(dom.measure)
    assert sym.inner_radius == 0.0


@pytest.mark.parametrize("name", ["power", "power:alpha=4,N=5,R=inf", "power(alpha=2,N=5,R=1)", "shifted-power",
                                  "critical-log", "fn:n=2", "zero", "constant:c=3", "annulus-log",
                                  "schwarz-shifted-power"])
def test_catalog_weights_nonnegative(name):
    entry = catalog_lookup(name)
    r = np.geomspace(1e-8, 1e4, 10_000)
    vals = entry.weight(r)
    assert np.all(vals[~np.isnan(vals)] >= 0)
    sing = [s.location for s in entry.weight.singularities if math.isfinite(s.location)]
    away = np.all(np.abs(r[:, None] - np.array(sing or [np.inf])[None, :]) > 1e-12, axis=1)
    assert np.all(np.isfinite(vals[away]))


def test_catalog_facts():
    assert ("WeakLorentz", "member") in catalog_lookup("power(alpha=4,N=5,R=inf)").known_facts
    facts = dict(catalog_lookup("shifted-power:beta=0.9,N=5").known_facts)
    assert facts["WeakLorentz"] == "not-member" and facts["classify"] == "Admissible/IntegralR3"
    assert "zero" in catalog_names()


def test_catalog_unknown():
    with pytest.raises(NotFoundError):
        catalog_lookup("nonexistent")
    with pytest.raises(NotFoundError):
        parse_name("power:alpha")


@pytest.mark.parametrize("name", ["power:alpha=4,N=5", "shifted-power:beta=0.9,N=5", "critical-log"])
def test_declared_pieces_are_monotone(name):
    assert catalog_lookup(name).weight.check_monotone()


def test_closed_form_rearrangements_nonincreasing():
    for name in ("power:alpha=3,N=5,R=1", "shifted-power:beta=0.9,N=5"):
        e = catalog_lookup(name)
        a = e.domain.measure if e.domain.bounded else omega_n(e.domain.dimension) * 31
        t = np.geomspace(1e-12 * a, a * (1 - 1e-9), 500)
        assert np.all(np.diff(e.weight.closed_form_rearrangement(t)) <= 0)


def test_positive_part_and_scaling():
    w = RadialWeight(lambda r: np.cos(3 * r), (Piece(0.0, math.pi / 3, -1), Piece(math.pi / 3, 2 * math.pi / 3, 1)))
    r = np.linspace(0.0, 2.0, 50)
    assert np.all(w.positive_part()(r) >= 0)
    assert np.allclose(w.positive_part()(r), np.maximum(np.cos(3 * r), 0))
    assert np.allclose(w.scaled(3.0)(r), 3.0 * w(r))
    t = table_weight([0.5, 1.0, 1.5], [1.0, 2.0, 0.5])
    assert [p.direction for p in t.pieces] == [0, 1, -1, 0]


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.5, 4.5), c=st.floats(0.1, 10.0))
def test_power_weight_scaling(alpha, c):
    r = np.geomspace(1e-3, 1e3, 20)
    assert np.allclose(power_weight(alpha, c)(r), c * r ** -alpha, rtol=1e-12)


def test_shifted_power_support():
    g = shifted_power_weight(0.9, 5)
    assert g(np.array([0.5, 2.5]))[0] == 0.0 and g(np.array([2.5]))[0] == 0.0
    assert g(np.array([1.5]))[0] == pytest.approx(0.5 ** -0.9)


def test_weight_config_files(tmp_path):
    csv_path = tmp_path / "w.csv"
    csv_path.write_text("r,g\n0.0,3\n0.5,2\n1.0,1\n")
    w = read_table_csv(csv_path)
    assert w(np.array([0.25]))[0] == pytest.approx(2.5)
    cfg = tmp_path / "w.yaml"
    cfg.write_text("weight:\n  kind: power\n  alpha: 3\ndomain:\n  shape: ball\n  dimension: 5\n  radius: 2\n")
    weight, dom = load_weight_config(cfg)
    assert dom == DomainSpec.ball(5, 2.0)
    assert weight(np.array([2.0]))[0] == pytest.approx(2.0 ** -3)
