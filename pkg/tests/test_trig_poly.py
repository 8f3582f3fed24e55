import math
from fractions import Fraction

import numpy as np
import pytest

from src.trig_poly import (
    Parity,
    RationalTorusPoint,
    TorusPoint,
    TrigMode,
    TrigPolynomial,
    load_polynomial,
    mode_eval,
    mode_partial,
    parity_add,
    poly_eval,
    poly_gradient,
    poly_hessian,
    save_polynomial,
    torus_distance,
    trig_exact,
)
from tests.conftest import mode

PI = math.pi


def test_parity_addition_is_mod_two():
    assert parity_add(1, 1) == Parity.SIN
    assert parity_add(0, 1) == Parity.COS
    assert Parity.SIN.flip() == Parity.COS


@pytest.mark.parametrize(
    "m, point, expected",
    [
        (mode(1, 1, 1, 1), TorusPoint(0.0, 0.0), 1.0),
        (mode(1, 1, 0, 1), TorusPoint(0.25, 0.0), 1.0),
        (mode(2, 3, 1, 1), TorusPoint(1 / 8, 1 / 12), 0.0),
    ],
)
def test_mode_eval(m, point, expected):
    assert mode_eval(m, point) == pytest.approx(expected, abs=1e-12)


def test_mode_eval_exact_at_rational_points():
    p = RationalTorusPoint(Fraction(1, 8), Fraction(1, 12))
    assert mode_eval(mode(2, 3, 1, 1), p) == 0.0
    assert trig_exact(Parity.COS, Fraction(1, 2)) == -1.0
    assert trig_exact(Parity.SIN, Fraction(3, 4)) == -1.0


def test_zero_frequency_sine_is_identically_zero():
    assert TrigMode(0, 2, Parity.SIN, Parity.COS).is_zero
    assert TrigPolynomial.from_mode(TrigMode(0, 2, Parity.SIN, Parity.COS)).terms == ()
    assert TrigMode(0, 0, Parity.COS, Parity.COS).is_constant


def test_mode_rejects_negative_frequency():
    with pytest.raises(ValueError):
        TrigMode(-1, 1)


def test_mode_parse():
    assert TrigMode.parse("2, 3, 1, 0") == mode(2, 3, 1, 0)
    with pytest.raises(ValueError):
        TrigMode.parse("1,1,2,0")
    with pytest.raises(ValueError):
        TrigMode.parse("1,1,1")


@pytest.mark.parametrize(
    "m, axis, scale, derived",
    [
        (mode(1, 1, 0, 0), 1, 2 * PI, mode(1, 1, 1, 0)),
        (mode(1, 2, 1, 1), 2, -4 * PI, mode(1, 2, 1, 0)),
    ],
)
def test_mode_partial(m, axis, scale, derived):
    s, d = mode_partial(m, axis)
    assert s == pytest.approx(scale)
    assert d == derived


def test_mode_partial_zero_frequency():
    s, _ = mode_partial(mode(0, 1, 1, 0), 1)
    assert s == 0.0


def test_polynomial_merges_and_drops_terms():
    m = mode(1, 1)
    poly = TrigPolynomial(((0.5, m), (0.5, m), (1.0, mode(2, 1)), (-1.0, mode(2, 1))))
    assert poly.terms == ((1.0, m),)


def test_poly_eval_examples():
    assert poly_eval(TrigPolynomial(), TorusPoint(0.3, 0.7)) == 0.0
    theta = TrigPolynomial(((1.0, mode(1, 1, 0, 0)), (0.03, mode(3, 5))))
    assert poly_eval(theta, TorusPoint(0.25, 0.25)) == pytest.approx(1.0, abs=1e-12)
    assert poly_eval(TrigPolynomial.from_mode(mode(1, 1), 2.0), TorusPoint(0.5, 0.0)) == pytest.approx(-2.0)


def test_gradient_examples():
    sin_sin = TrigPolynomial.from_mode(mode(1, 1, 0, 0))
    assert poly_gradient(TrigPolynomial.constant(4.0), TorusPoint(0.1, 0.2)) == (0.0, 0.0)
    g = poly_gradient(sin_sin, RationalTorusPoint(Fraction(1, 4), Fraction(1, 4)))
    assert g == (0.0, 0.0)
    g = poly_gradient(sin_sin, TorusPoint(0.0, 0.25))
    assert g[0] == pytest.approx(2 * PI)
    assert g[1] == pytest.approx(0.0, abs=1e-12)


def test_hessian_examples():
    four_pi2 = 4 * PI**2
    assert np.array_equal(poly_hessian(TrigPolynomial.constant(1.0), TorusPoint(0.3, 0.3)), np.zeros((2, 2)))
    h = poly_hessian(TrigPolynomial.from_mode(mode(1, 1, 0, 0)), RationalTorusPoint(Fraction(1, 4), Fraction(1, 4)))
    assert h == pytest.approx(np.diag([-four_pi2, -four_pi2]))
    h = poly_hessian(TrigPolynomial.from_mode(mode(1, 1, 1, 1)), TorusPoint(0.0, 0.0))
    assert h == pytest.approx(np.diag([-four_pi2, -four_pi2]))


def test_hessian_matches_finite_differences(rng):
    poly = TrigPolynomial(((1.0, mode(2, 3, 0, 1)), (0.4, mode(1, 2, 1, 0)), (-0.2, mode(3, 0, 0, 1))))
    eps = 1e-5
    for _ in range(5):
        a, b = rng.uniform(0, 1, size=2)
        gp = np.array(poly_gradient(poly, TorusPoint(a + eps, b)))
        gm = np.array(poly_gradient(poly, TorusPoint(a - eps, b)))
        h = poly_hessian(poly, TorusPoint(a, b))
        assert h[:, 0] == pytest.approx((gp - gm) / (2 * eps), rel=1e-5, abs=1e-4)
        assert h[0, 1] == h[1, 0]


def test_array_evaluation_matches_scalar(rng):
    poly = TrigPolynomial(((1.0, mode(1, 1)), (0.18, mode(1, 2)), (0.3, mode(0, 2, 1, 0))))
    t1 = rng.uniform(0, 1, size=7)
    t2 = rng.uniform(0, 1, size=7)
    values = poly.evaluate_array(t1, t2)
    g1, g2 = poly.gradient_array(t1, t2)
    for i in range(7):
        p = TorusPoint(t1[i], t2[i])
        assert values[i] == pytest.approx(poly.evaluate(p), abs=1e-12)
        assert (g1[i], g2[i]) == pytest.approx(poly_gradient(poly, p), abs=1e-10)


def test_torus_point_wraps():
    p = TorusPoint(1.25, -0.25)
    assert p.to_list() == pytest.approx([0.25, 0.75])
    assert TorusPoint(1.0, 0.0).theta1 == 0.0
    assert torus_distance(TorusPoint(0.95, 0.0), TorusPoint(0.05, 0.0)) == pytest.approx(0.1)


def test_rational_point_reduces():
    p = RationalTorusPoint(Fraction(5, 4), Fraction(-1, 4))
    assert p.as_strings() == ["1/4", "3/4"]
    assert RationalTorusPoint.parse("3/8", "1/2").to_float().to_list() == [0.375, 0.5]


def test_leading_two_dimensional_term():
    poly = TrigPolynomial(((5.0, mode(1, 0)), (-0.3, mode(2, 1)), (0.1, mode(1, 1))))
    assert poly.leading_two_dimensional_term() == (-0.3, mode(2, 1))
    assert TrigPolynomial.constant(1.0).leading_two_dimensional_term() is None
    assert poly.max_frequency() == 2


def test_polynomial_json_file(tmp_path):
    poly = TrigPolynomial(((1.0, mode(1, 1, 0, 0)), (0.03, mode(3, 5))))
    path = save_polynomial(poly, tmp_path / "poly.json")
    assert load_polynomial(path) == poly
    with pytest.raises(FileNotFoundError):
        load_polynomial(tmp_path / "missing.json")


def test_gradient_matches_central_differences(rng):
    poly = TrigPolynomial(((1.0, mode(1, 1)), (0.18, mode(1, 2)), (-0.3, mode(3, 2, 0, 1)), (0.05, mode(0, 4, 1, 0))))
    eps = 1e-6
    for t1, t2 in rng.uniform(0, 1, size=(100, 2)):
        d1 = (poly_eval(poly, TorusPoint(t1 + eps, t2)) - poly_eval(poly, TorusPoint(t1 - eps, t2))) / (2 * eps)
        d2 = (poly_eval(poly, TorusPoint(t1, t2 + eps)) - poly_eval(poly, TorusPoint(t1, t2 - eps))) / (2 * eps)
        assert poly_gradient(poly, TorusPoint(t1, t2)) == pytest.approx((d1, d2), rel=1e-6, abs=1e-6)


def test_polynomial_is_periodic(rng):
    poly = TrigPolynomial(((1.0, mode(2, 3, 0, 1)), (0.4, mode(1, 2, 1, 0)), (0.7, mode(0, 0))))
    t1 = rng.uniform(0, 1, size=50)
    t2 = rng.uniform(0, 1, size=50)
    values = poly.evaluate_array(t1, t2)
    assert np.allclose(poly.evaluate_array(t1 + 1.0, t2), values, atol=1e-12)
    assert np.allclose(poly.evaluate_array(t1, t2 + 1.0), values, atol=1e-12)
    assert np.allclose(poly.evaluate_array(t1 - 3.0, t2 + 2.0), values, atol=1e-11)
    g1, g2 = poly.gradient_array(t1, t2)
    s1, s2 = poly.gradient_array(t1 + 1.0, t2 - 1.0)
    assert np.allclose(s1, g1, atol=1e-10)
    assert np.allclose(s2, g2, atol=1e-10)
