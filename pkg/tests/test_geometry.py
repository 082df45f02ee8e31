import math
from fractions import Fraction

import numpy as np
import pytest

from btq.errors import CapacityError
from btq.geometry import (DEFAULT_CONVENTIONS, TOTAL_AREA, QuadratureRule,
                          SpherePoint, curvature_check, diastasis, make_rule)


def beta_closed_form(a, b):
    # independent oracle: int_0^1 s^a (1-s)^b ds = a! b!/(a+b+1)!
    return float(Fraction(math.factorial(a) * math.factorial(b),
                          math.factorial(a + b + 1)))


def test_total_area_is_2pi():
    rule = make_rule(0, 0)
    s, phi, w = rule.grid()
    assert abs(rule.integrate(np.ones_like(s)) - TOTAL_AREA) < 1e-12
    assert abs(DEFAULT_CONVENTIONS.total_area - TOTAL_AREA) == 0.0


def test_highest_radial_moment_exact():
    for m, d in ((0, 0), (3, 2), (10, 4)):
        rule = make_rule(m, d)
        s, phi, w = rule.grid()
        val = rule.integrate(s ** (m + d))
        expect = 2.0 * math.pi * beta_closed_form(m + d, 0)
        assert abs(val - expect) <= 1e-13 * abs(expect)


def test_full_period_oscillation_integrates_to_zero():
    rule = make_rule(2, 1)
    s, phi, w = rule.grid()
    assert abs(rule.integrate(np.exp(1j * phi))) < 1e-13


def test_quadrature_exactness_100_random_moments(rng):
    rule = make_rule(8, 4)
    s, phi, w = rule.grid()
    for _ in range(100):
        a = int(rng.randint(0, rule.max_radial_degree + 1))
        b = int(rng.randint(0, rule.max_radial_degree + 1 - a))
        q = int(rng.randint(-rule.max_angular_frequency,
                            rule.max_angular_frequency + 1))
        val = rule.integrate(s**a * (1.0 - s) ** b * np.exp(1j * q * phi))
        if q == 0:
            expect = 2.0 * math.pi * beta_closed_form(a, b)
            assert abs(val - expect) <= 1e-12 * abs(expect)
        else:
            assert abs(val) < 1e-12


def test_rule_declares_its_exactness():
    rule = make_rule(5, 3)
    assert rule.max_radial_degree >= 5 + 3
    assert rule.max_angular_frequency >= 2 * 5 + 3
    assert np.all(rule.s_nodes > 0.0) and np.all(rule.s_nodes < 1.0)


def test_margin_increases_rule():
    base = make_rule(4, 2)
    fat = make_rule(4, 2, margin=6)
    assert fat.max_radial_degree >= base.max_radial_degree + 6
    assert fat.n_phi >= base.n_phi + 6


def test_capacity_error():
    with pytest.raises(CapacityError):
        make_rule(4000, 4000)


def test_chart_roundtrip(rng):
    for _ in range(50):
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        p = SpherePoint.from_z(z)
        x1, x2, x3 = p.ambient()
        assert abs(x1 * x1 + x2 * x2 + x3 * x3 - 1.0) < 1e-12
        q = SpherePoint.from_ambient(x1, x2, x3)
        assert q.chart == "finite"
        assert abs(q.z - z) < 1e-12 * max(1.0, abs(z))


def test_chart_conventions():
    assert SpherePoint.from_z(0).ambient() == (0.0, 0.0, 1.0)
    assert SpherePoint.infinity().ambient() == (0.0, 0.0, -1.0)
    # x2 is positive along +Im z
    _, x2, _ = SpherePoint.from_z(0.5j).ambient()
    assert x2 > 0
    with pytest.raises(ValueError):
        SpherePoint.from_ambient(0.5, 0.5, 0.5)


def test_diastasis_examples():
    north = SpherePoint.from_z(0)
    assert diastasis(north, north) == 0.0
    assert abs(diastasis(north, SpherePoint.from_z(1)) - math.log(2)) < 1e-14
    assert math.isinf(diastasis(north, SpherePoint.infinity()))


def test_diastasis_symmetric_positive(rng):
    pts = [SpherePoint.from_z(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))
           for _ in range(12)] + [SpherePoint.infinity()]
    for p in pts:
        for q in pts:
            d1, d2 = diastasis(p, q), diastasis(q, p)
            assert d1 == d2
            assert d1 >= 0.0
            if p is not q:
                assert d1 > 0.0 or (p.chart == q.chart == "finite"
                                    and abs(p.z - q.z) < 1e-15)


def test_diastasis_antipode():
    p = SpherePoint.from_z(0.7 - 0.2j)
    assert math.isinf(diastasis(p, p.antipode()))


def test_curvature_check(rng):
    pts = [SpherePoint.from_z(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))
           for _ in range(20)]
    assert curvature_check(0, pts) == 0.0
    # m=1 at z=0: both sides equal 1
    assert curvature_check(1, [SpherePoint.from_z(0)]) < 1e-15
    assert curvature_check(5, pts) < 1e-12


def test_quadrature_fixed_order_determinism():
    rule = make_rule(6, 2)
    s, phi, w = rule.grid()
    vals = np.cos(3 * phi) * s**2
    assert rule.integrate(vals) == rule.integrate(vals.copy())


def test_rule_is_frozen():
    rule = make_rule(2, 1)
    with pytest.raises(AttributeError):
        rule.n_phi = 7
    assert isinstance(rule, QuadratureRule)
