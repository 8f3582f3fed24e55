import math
from dataclasses import replace
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from src.dynamics import (
    Classification,
    PointType,
    basis_critical_points,
    classify_eigen,
    classify_numeric,
    field_gradient,
    field_hessian,
    lattice_critical_points,
    nash_field,
    nash_hessian,
    poincare_hopf_audit,
    refine_critical_point,
    refine_seeds,
    single_axis_flow,
)
from src.errors import LeftBasinError, NoConvergenceError, NotACriticalPointError
from src.spectral import truncate_spectrum
from src.trig_poly import RationalTorusPoint, TorusPoint, TrigPolynomial, poly_hessian, torus_distance
from tests.conftest import mode

FOUR_PI2 = 4 * math.pi**2
HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def test_nash_field_examples(sin_sin):
    assert nash_field(TrigPolynomial.constant(2.0), TorusPoint(0.3, 0.1)) == (0.0, 0.0)
    n = nash_field(sin_sin, TorusPoint(0.0, 0.25))
    assert n[0] == pytest.approx(2 * math.pi)
    assert n[1] == pytest.approx(0.0, abs=1e-12)
    # sin(2πθ1)cos(2πθ2): minus z definicji pola Nasha znosi minus pochodnej cosinusa
    n = nash_field(TrigPolynomial.from_mode(mode(1, 1, 0, 1)), RationalTorusPoint(QUARTER, QUARTER))
    assert n == pytest.approx((0.0, 2 * math.pi))


def test_nash_hessian_constant():
    nh = nash_hessian(TrigPolynomial.constant(1.0), TorusPoint(0.2, 0.2))
    assert np.allclose(nh.entries, 0.0)
    assert nh.eigenvalues == (0, 0)


def test_nash_trace_is_wave_operator(rng):
    poly = TrigPolynomial(((1.0, mode(2, 3, 0, 1)), (0.4, mode(1, 2, 1, 0)), (-0.2, mode(3, 1))))
    for t1, t2 in rng.uniform(0, 1, size=(20, 2)):
        p = TorusPoint(t1, t2)
        h = poly_hessian(poly, p)
        # ślad hesjanu Nasha = ∂²F/∂θ1² − ∂²F/∂θ2²
        assert nash_hessian(poly, p).trace == pytest.approx(h[0, 0] - h[1, 1], rel=1e-12, abs=1e-9)


def test_census_of_sin_sin():
    census = basis_critical_points(mode(1, 1, 0, 0))
    assert len(census) == 8
    assert census.zero_count == 4
    type_ii = {tuple(r.location.as_strings()) for r in census.of_type(PointType.II)}
    assert type_ii == {("0/1", "0/1"), ("0/1", "1/2"), ("1/2", "0/1"), ("1/2", "1/2")}
    type_i = {tuple(r.location.as_strings()) for r in census.of_type(PointType.I)}
    assert type_i == {("1/4", "1/4"), ("1/4", "3/4"), ("3/4", "1/4"), ("3/4", "3/4")}
    assert all(r.classification == Classification.CENTER for r in census.of_type(PointType.II))
    assert all(r.classification == Classification.SADDLE for r in census.of_type(PointType.I))


def _zeros(m: int, parity: int) -> set[Fraction]:
    # zera sin(2πmθ) (parity 0) albo cos(2πmθ) (parity 1) na [0, 1)
    return {Fraction(2 * k + parity, 4 * m) for k in range(2 * m)}


def _locations(reports) -> set[tuple[Fraction, Fraction]]:
    return {(r.location.theta1, r.location.theta2) for r in reports}


@pytest.mark.parametrize("m1, m2, alpha, beta", list(product(range(1, 5), range(1, 5), (0, 1), (0, 1))))
def test_census_of_every_basis_mode(m1, m2, alpha, beta):
    census = basis_critical_points(mode(m1, m2, alpha, beta))
    assert len(census) == 8 * m1 * m2
    centers = census.of_type(PointType.II)
    saddles = census.of_type(PointType.I)
    assert len(centers) == len(saddles) == 4 * m1 * m2
    assert all(r.classification == Classification.CENTER for r in centers)
    assert all(r.classification == Classification.SADDLE for r in saddles)
    assert _locations(centers) == set(product(_zeros(m1, alpha), _zeros(m2, beta)))
    assert _locations(saddles) == set(product(_zeros(m1, 1 - alpha), _zeros(m2, 1 - beta)))
    assert poincare_hopf_audit(census.reports).passed


def test_census_needs_two_dimensional_mode():
    with pytest.raises(ValueError):
        basis_critical_points(mode(2, 0))


def test_single_axis_flows():
    assert single_axis_flow(mode(0, 0)).orientation == "constant"
    flow = single_axis_flow(mode(2, 0, 0, 1))
    assert flow.orientation == "horizontal"
    assert flow.critical_lines == [Fraction(1, 8), Fraction(3, 8), Fraction(5, 8), Fraction(7, 8)]
    # sin(4πθ1): maksima przy 1/8 i 5/8 przyciągają
    assert flow.attracting_flags == [True, False, True, False]
    flow = single_axis_flow(mode(0, 1, 0, 0))
    assert flow.orientation == "vertical"
    assert len(flow.critical_lines) == 2
    with pytest.raises(ValueError):
        single_axis_flow(mode(1, 1))


def test_classify_numeric_on_basis_mode(sin_sin):
    center = classify_numeric(sin_sin, RationalTorusPoint(0, 0))
    assert center.classification == Classification.CENTER
    assert center.eigen[0].imag == pytest.approx(FOUR_PI2)
    assert center.eigen[0].real == pytest.approx(0.0, abs=1e-9)
    assert center.morse_index == 1

    maximum = classify_numeric(sin_sin, RationalTorusPoint(QUARTER, QUARTER))
    assert maximum.classification == Classification.SADDLE
    assert maximum.morse_index == 2
    minimum = classify_numeric(sin_sin, RationalTorusPoint(QUARTER, Fraction(3, 4)))
    assert minimum.morse_index == 0


def test_classify_numeric_rejects_regular_point(sin_sin):
    with pytest.raises(NotACriticalPointError):
        classify_numeric(sin_sin, TorusPoint(0.1, 0.3))


def test_classify_eigen_kinds():
    assert classify_eigen((complex(-1, 2), complex(-1, -2)), 1e-7) == Classification.SPIRAL_ATTRACTOR
    assert classify_eigen((complex(1, 2), complex(1, -2)), 1e-7) == Classification.SPIRAL_REPULSOR
    assert classify_eigen((complex(-1, 0), complex(-3, 0)), 1e-7) == Classification.ATTRACTING_NODE
    assert classify_eigen((complex(2, 0), complex(3, 0)), 1e-7) == Classification.REPELLING_NODE
    assert classify_eigen((complex(2, 0), complex(-3, 0)), 1e-7) == Classification.SADDLE
    assert classify_eigen((complex(0, 0), complex(-3, 0)), 1e-7) == Classification.DEGENERATE
    assert classify_eigen((complex(0, 0), complex(0, 0)), 1e-7) == Classification.DEGENERATE


def test_poincare_hopf_audit(sin_sin):
    reports = [classify_numeric(sin_sin, r.location) for r in basis_critical_points(mode(1, 1, 0, 0))]
    assert sorted(r.morse_index for r in reports) == [0, 0, 1, 1, 1, 1, 2, 2]
    audit = poincare_hopf_audit(reports)
    assert audit.index_sum == 0
    assert audit.counted == 8
    assert audit.passed
    empty = poincare_hopf_audit([])
    assert (empty.index_sum, empty.counted, empty.skipped) == (0, 0, 0)


def test_poincare_hopf_audit_reports_skipped_degenerate_points(sin_sin, caplog):
    reports = [classify_numeric(sin_sin, r.location) for r in basis_critical_points(mode(1, 1, 0, 0))]
    reports[0] = replace(reports[0], morse_index=None, classification=Classification.DEGENERATE)
    with caplog.at_level("WARNING", logger="src.dynamics"):
        audit = poincare_hopf_audit(reports)
    assert audit.skipped == 1
    assert audit.counted == 7
    assert not audit.complete
    assert not audit.passed
    assert audit.to_dict()["skipped"] == 1
    assert "skips 1 degenerate" in caplog.text


def test_newton_converges_to_exact_center(sin_sin):
    p = refine_critical_point(sin_sin, TorusPoint(0.01, 0.02))
    assert torus_distance(p, TorusPoint(0.0, 0.0)) < 1e-12


def test_newton_zero_iterations_at_exact_point(sin_sin):
    p = refine_critical_point(sin_sin, RationalTorusPoint(HALF, 0), max_iter=0)
    assert p.to_list() == [0.5, 0.0]


def test_newton_trust_radius(sin_sin):
    with pytest.raises(LeftBasinError):
        refine_critical_point(sin_sin, TorusPoint(0.1, 0.1), trust_radius=0.01)


def test_newton_iteration_limit(sin_sin):
    with pytest.raises(NoConvergenceError):
        refine_critical_point(sin_sin, TorusPoint(0.03, 0.02), max_iter=1)


def test_reference_truncation_is_a_spiral_attractor(reference_table):
    theta4 = truncate_spectrum(reference_table, 4)
    p = refine_critical_point(theta4, RationalTorusPoint(QUARTER, QUARTER))
    assert torus_distance(p, TorusPoint(0.25, 0.25)) < 0.05
    report = classify_numeric(theta4, p)
    assert report.residual <= 1e-10
    assert report.classification == Classification.SPIRAL_ATTRACTOR
    assert report.morse_index == 1


def test_lattice_critical_points_of_polynomial():
    poly = TrigPolynomial(((1.0, mode(1, 1, 0, 0)), (0.03, mode(3, 5))))
    reports = lattice_critical_points(poly)
    assert len(reports) == 8
    type_ii = [r for r in reports if r.point_type == PointType.II]
    assert all(r.classification in (Classification.SPIRAL_ATTRACTOR, Classification.SPIRAL_REPULSOR) for r in type_ii)
    assert poincare_hopf_audit(reports).passed
    assert lattice_critical_points(TrigPolynomial.constant(1.0)) == []


def test_finite_differences_match_analytic(rng):
    poly = TrigPolynomial(((1.0, mode(1, 1)), (0.3, mode(2, 1, 0, 1))))

    class Opaque:
        def evaluate(self, p):
            return poly.evaluate(p)

        def evaluate_array(self, theta1, theta2):
            return poly.evaluate_array(theta1, theta2)

    for _ in range(4):
        p = TorusPoint(*rng.uniform(0, 1, size=2))
        assert field_gradient(Opaque(), p) == pytest.approx(field_gradient(poly, p), rel=1e-5, abs=1e-5)
        assert field_hessian(Opaque(), p) == pytest.approx(field_hessian(poly, p), rel=1e-4, abs=1e-3)


def test_gan_equilibria(gan_field):
    seeds = basis_critical_points(mode(1, 1)).reports
    reports = refine_seeds(gan_field, seeds)
    by_type = {PointType.I: [], PointType.II: []}
    for r in reports:
        by_type[r.point_type].append(r)
    attractors = by_type[PointType.II]
    assert len(attractors) == 4
    for target in [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]:
        near = [r for r in attractors if torus_distance(r.location, TorusPoint(*target)) < 0.05]
        assert len(near) == 1
        assert near[0].classification.is_attracting
    edges = [r for r in by_type[PointType.I] if r.location.theta1 != r.location.theta2]
    assert len(edges) == 2
    assert all(r.classification == Classification.SADDLE for r in edges)
