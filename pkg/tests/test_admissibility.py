import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyrellich.admissibility import (AdmissibilityVerdict, Criterion, CriterionResult, Status, UnsupportedGeometry,
                                        classify, constant_bound, integral_r3, l1_norm)
from hardyrellich.profiles import (DomainSpec, Piece, RadialWeight, omega_n, power_weight, shifted_power_weight,
                                   table_weight, zero_weight)

W5 = omega_n(5)
# int_0^1 x^-0.9 (1+x)^3 dx
SHIFTED_INTEGRAL = 10 + 3 / 1.1 + 3 / 2.1 + 1 / 3.1


def test_shifted_power_certified_by_integral():
    v = classify(shifted_power_weight(0.9, 5), DomainSpec.fullspace(5))
    assert v.status is Status.ADMISSIBLE and v.criterion is Criterion.INTEGRAL_R3
    assert v.certificate_value == pytest.approx(SHIFTED_INTEGRAL, rel=1e-9)
    assert v.constant_bound == pytest.approx(5 * W5 * SHIFTED_INTEGRAL, rel=1e-9)
    assert v.constant_bound == pytest.approx(381.0569, abs=1e-4)
    assert not v.result_for(Criterion.WEAK_LORENTZ_N5).passed


def test_critical_power_certified_by_weak_lorentz():
    v = classify(power_weight(4), DomainSpec.fullspace(5))
    assert v.criterion is Criterion.WEAK_LORENTZ_N5
    # g** = 5 g* for |x|^-4 in dimension 5
    assert v.certificate_value == pytest.approx(5 * W5 ** 0.8, rel=1e-8)
    assert v.constant_bound == pytest.approx(25 / 9, rel=1e-8)


def test_supercritical_power_rejected():
    v = classify(power_weight(4.5), DomainSpec.ball(5, 1.0))
    assert v.status is Status.NOT_ADMISSIBLE and v.criterion is Criterion.NECESSITY_WEAK_LORENTZ
    assert math.isinf(v.certificate_value)


def test_non_monotone_divergent_weight_is_inconclusive():
    v = classify(shifted_power_weight(1.5, 5), DomainSpec.fullspace(5), exhaustive=True)
    assert v.status is Status.INCONCLUSIVE and v.criterion is None
    assert all(not r.passed for r in v.details)


def test_zero_weight():
    v = classify(zero_weight(), DomainSpec.ball(5, 1.0))
    assert v.status is Status.ADMISSIBLE and v.certificate_value == 0.0 and v.constant_bound == 0.0


@pytest.mark.parametrize("dom, criterion", [
    (DomainSpec.ball(4, 1.0), Criterion.MLOGL4),
    (DomainSpec.ball(3, 1.0), Criterion.BOUNDED_LOW_DIM_L1),
    (DomainSpec.exterior(3), Criterion.EXTERIOR_N34),
    (DomainSpec.exterior(2), Criterion.EXTERIOR_N2),
    (DomainSpec.annulus(3, 2.0), Criterion.ANNULUS_L1),
])
def test_criterion_per_geometry(dom, criterion):
    w = table_weight([0.0, 1.5, 3.0], [2.0, 1.0, 0.0])
    v = classify(w, dom)
    assert v.status is Status.ADMISSIBLE and v.criterion is criterion
    assert 0 < v.constant_bound < math.inf


def test_bounded_low_dim_constant_scales_with_l1_norm():
    dom = DomainSpec.ball(3, 1.0)
    v = classify(power_weight(1), dom)
    # int_B |x|^-1 dx = 4 pi int_0^1 r dr = 2 pi
    assert v.certificate_value == pytest.approx(l1_norm(power_weight(1), dom)) == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("dom", [DomainSpec.fullspace(3), DomainSpec.fullspace(4), DomainSpec.exterior(1)])
def test_unsupported_geometry(dom):
    with pytest.raises(UnsupportedGeometry):
        classify(power_weight(1), dom)


def test_positive_part_reduction():
    dom = DomainSpec.ball(5, 1.0)
    w = RadialWeight(lambda r: 1.0 - 2.0 * r, (Piece(0.0, math.inf, -1),))
    plus = table_weight([0.0, 0.5], [1.0, 0.0])
    a, b = classify(w, dom), classify(plus, dom)
    assert a.criterion is b.criterion
    assert a.certificate_value == pytest.approx(b.certificate_value, rel=1e-9)


def test_verdict_json_round_trip():
    for v in (classify(power_weight(4.5), DomainSpec.ball(5, 1.0)),
              classify(shifted_power_weight(0.9, 5), DomainSpec.fullspace(5), exhaustive=True)):
        back = AdmissibilityVerdict.from_dict(json.loads(json.dumps(v.to_dict())))
        assert back.status is v.status and back.criterion is v.criterion
        assert back.certificate_value == v.certificate_value
        assert back.details == v.details


def test_verdict_invariants():
    with pytest.raises(ValueError):
        AdmissibilityVerdict(Status.ADMISSIBLE, Criterion.NECESSITY_MLOGL, 1.0)
    with pytest.raises(ValueError):
        AdmissibilityVerdict(Status.ADMISSIBLE, Criterion.INTEGRAL_R3, math.inf)
    with pytest.raises(ValueError):
        AdmissibilityVerdict(Status.NOT_ADMISSIBLE, Criterion.INTEGRAL_R3, math.inf)
    with pytest.raises(ValueError):
        constant_bound(power_weight(1), DomainSpec.ball(5, 1.0),
                       AdmissibilityVerdict(Status.INCONCLUSIVE, None, math.inf))
    assert CriterionResult.from_dict(CriterionResult(Criterion.MLOGL4, math.inf, False).to_dict()).value == math.inf


values = st.lists(st.floats(0.0, 10.0), min_size=4, max_size=4)


@settings(max_examples=15, deadline=None)
@given(a=values, b=values)
def test_certificates_monotone_in_weight(a, b):
    radii = np.linspace(0.0, 2.0, 4)
    small = table_weight(radii, a)
    big = table_weight(radii, np.add(a, b))
    dom = DomainSpec.fullspace(5)
    assert integral_r3(small, dom) <= integral_r3(big, dom) * (1 + 1e-12) + 1e-15
    vs, vb = classify(small, dom, exhaustive=True), classify(big, dom, exhaustive=True)
    ws, wb = (v.result_for(Criterion.WEAK_LORENTZ_N5) for v in (vs, vb))
    if ws is not None and wb is not None:
        assert ws.value <= wb.value * (1 + 1e-9) + 1e-15
