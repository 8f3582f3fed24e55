from collections import Counter
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from src.dynamics import Classification, classify_numeric, lattice_indices, refine_critical_point, type_ii_point
from src.errors import DegenerateSignError
from src.sign_analysis import (
    OneSidedSign,
    classify_truncation,
    classify_two_term,
    par,
    sigma,
    vanishing_criterion,
)
from src.spectral import truncate_spectrum
from src.trig_poly import Parity, TrigMode, TrigPolynomial, mode_eval, parity_add
from tests.conftest import mode

SPIRAL_LEAD = mode(1, 1, 0, 0)
SPIRAL_PERT = mode(3, 5, 1, 1)


def test_sigma_table():
    assert sigma(Parity.SIN, Fraction(1, 4)).value == 1
    assert sigma(Parity.COS, Fraction(1, 4)) == OneSidedSign(left=1, value=0, right=-1)
    assert sigma(Parity.SIN, Fraction(3, 4)).value == -1
    assert sigma(Parity.SIN, Fraction(0)) == OneSidedSign(-1, 0, 1)
    assert sigma(Parity.COS, Fraction(7, 4)) == OneSidedSign(-1, 0, 1)
    assert sigma(Parity.COS, Fraction(1, 8)).towards(-1) == 1


def test_two_term_breaks_centers_into_spirals():
    for k1, k2 in lattice_indices(SPIRAL_LEAD):
        report = classify_two_term(SPIRAL_LEAD, 0.03, SPIRAL_PERT, k1, k2)
        assert report.classification in (Classification.SPIRAL_ATTRACTOR, Classification.SPIRAL_REPULSOR)
        assert not report.deferred
        assert report.sign_triple is None


def test_two_term_equal_frequencies_keep_centers():
    lead = mode(2, 2, 0, 0)
    reports = [classify_two_term(lead, 0.02, mode(4, 4), k1, k2) for k1, k2 in lattice_indices(lead)]
    assert len(reports) == 16
    assert all(r.classification == Classification.CENTER and r.deferred for r in reports)


def test_two_term_gan_leading_pair_is_deferred():
    report = classify_two_term(mode(1, 1), 0.18, mode(1, 2), 0, 0)
    assert report.classification == Classification.CENTER
    assert report.deferred
    assert report.sign_triple.B1 == 0
    assert report.location.as_strings() == ["1/4", "1/4"]


def test_two_term_single_gan_perturbation_is_deferred():
    report = classify_two_term(mode(1, 1), -0.003, mode(2, 3), 0, 0)
    assert report.classification == Classification.CENTER
    assert report.deferred
    assert report.sign_triple.A == 0
    assert report.sign_triple.B1 == 0


def test_two_term_validation():
    with pytest.raises(ValueError):
        classify_two_term(SPIRAL_LEAD, 1.0, SPIRAL_PERT, 0, 0)
    with pytest.raises(ValueError):
        classify_two_term(SPIRAL_LEAD, 0.1, mode(2, 0), 0, 0)


def test_truncation_agrees_with_two_term_at_gradient_zero_points():
    poly = TrigPolynomial(((1.0, SPIRAL_LEAD), (0.03, SPIRAL_PERT)))
    for k1, k2 in lattice_indices(SPIRAL_LEAD):
        two_term = classify_two_term(SPIRAL_LEAD, 0.03, SPIRAL_PERT, k1, k2)
        truncated = classify_truncation(poly, k1, k2)
        assert truncated.trace_sign == two_term.trace_sign
        numeric = classify_numeric(poly, type_ii_point(SPIRAL_LEAD, k1, k2))
        assert numeric.trace_sign == truncated.trace_sign
        assert numeric.classification == truncated.classification


def test_reference_truncation_turns_center_into_attractor(reference_table):
    report = classify_truncation(truncate_spectrum(reference_table, 4), 0, 0)
    assert report.location.as_strings() == ["1/4", "1/4"]
    assert report.classification == Classification.SPIRAL_ATTRACTOR
    assert report.sign_triple.to_dict() == {"A": 1, "B1": -1, "B2": -1}
    assert report.note.startswith("second-order")


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_reference_short_truncations_stay_centers(reference_table, s):
    report = classify_truncation(truncate_spectrum(reference_table, s), 0, 0)
    assert report.classification == Classification.CENTER
    assert report.deferred


def test_truncation_needs_two_dimensional_lead():
    with pytest.raises(ValueError):
        classify_truncation(TrigPolynomial.from_mode(mode(2, 0, 0, 1)), 0, 0)


def test_par():
    assert par(12) == 2
    assert par(1) == 0
    assert par(7) == 0
    assert par(64) == 6
    with pytest.raises(ValueError):
        par(0)


def test_vanishing_criterion_example():
    assert vanishing_criterion(1, 1, 2, 5, 0, 0) is False
    assert vanishing_criterion(2, 1, 1, 1, 0, 0) is True


def _vanishes_somewhere(m1, m2, n1, n2, alpha, beta):
    lead = TrigMode(m1, m2, Parity(alpha), Parity(beta))
    factor = TrigMode(n1, n2, parity_add(alpha, 1), parity_add(beta, 1))
    for k1, k2 in lattice_indices(lead):
        if mode_eval(factor, type_ii_point(lead, k1, k2)) == 0.0:
            return True
    return False


def test_vanishing_criterion_matches_brute_force():
    for m1, m2, n1, n2 in product(range(1, 5), repeat=4):
        for alpha, beta in product((0, 1), repeat=2):
            expected = _vanishes_somewhere(m1, m2, n1, n2, alpha, beta)
            assert vanishing_criterion(m1, m2, n1, n2, alpha, beta) == expected, (m1, m2, n1, n2, alpha, beta)


def _factor_vanishes(n: int, parity: int, theta: Fraction) -> bool:
    # sin(2πnθ) = 0 ⇔ 4nθ parzyste, cos(2πnθ) = 0 ⇔ 4nθ nieparzyste
    a, b = theta.numerator, theta.denominator
    return (4 * n * a) % b == 0 and (4 * n * a // b) % 2 == int(parity)


def test_vanishing_criterion_matches_exact_lattice_search():
    lattices = {}
    for m1, m2, alpha, beta in product(range(1, 9), range(1, 9), (0, 1), (0, 1)):
        lead = TrigMode(m1, m2, Parity(alpha), Parity(beta))
        lattices[m1, m2, alpha, beta] = [type_ii_point(lead, k1, k2) for k1, k2 in lattice_indices(lead)]
    for (m1, m2, alpha, beta), points in lattices.items():
        for n1, n2 in product(range(1, 9), repeat=2):
            p1, p2 = 1 - alpha, 1 - beta
            expected = any(
                _factor_vanishes(n1, p1, p.theta1) or _factor_vanishes(n2, p2, p.theta2) for p in points
            )
            assert vanishing_criterion(m1, m2, n1, n2, alpha, beta) == expected, (m1, m2, n1, n2, alpha, beta)


def _census(lead, mu, pert):
    return Counter(classify_two_term(lead, mu, pert, k1, k2).classification for k1, k2 in lattice_indices(lead))


def test_two_term_sin_cos_lead_splits_into_spirals():
    counts = _census(mode(1, 1, 0, 1), 0.02, mode(3, 5, 1, 0))
    assert counts == {Classification.SPIRAL_REPULSOR: 2, Classification.SPIRAL_ATTRACTOR: 2}


@pytest.mark.parametrize(
    "lead, pert, centers",
    [
        (mode(1, 2, 0, 0), mode(2, 3, 1, 1), 4),
        (mode(2, 2, 0, 0), mode(3, 5, 1, 1), 12),
    ],
)
def test_two_term_mixed_spirals_and_centers(lead, pert, centers):
    counts = _census(lead, 0.1, pert)
    assert counts == {
        Classification.SPIRAL_REPULSOR: 2,
        Classification.SPIRAL_ATTRACTOR: 2,
        Classification.CENTER: centers,
    }
    poly = TrigPolynomial(((1.0, lead), (0.1, pert)))
    for k1, k2 in lattice_indices(lead):
        report = classify_two_term(lead, 0.1, pert, k1, k2)
        if not report.deferred:
            continue
        # odroczone punkty są centrami także numerycznie
        p = refine_critical_point(poly, report.location, trust_radius=0.05)
        assert classify_numeric(poly, p).classification == Classification.CENTER


def test_two_term_same_parity_perturbation_keeps_all_centers():
    counts = _census(mode(1, 2, 0, 0), 0.1, mode(3, 5, 0, 0))
    assert counts == {Classification.CENTER: 8}


def test_two_term_agrees_with_eigenvalues_on_random_instances():
    rng = np.random.default_rng(7)
    compared = deferred = 0
    disagreements = []
    for _ in range(200):
        m1, m2 = rng.integers(1, 3, size=2)
        n1, n2 = rng.integers(1, 5, size=2)
        a, b, g, d = rng.integers(0, 2, size=4)
        lead = mode(int(m1), int(m2), int(a), int(b))
        pert = mode(int(n1), int(n2), int(g), int(d))
        mu = float(rng.choice((-1.0, 1.0)) * rng.uniform(0.01, 0.03))
        indices = lattice_indices(lead)
        k1, k2 = indices[rng.integers(len(indices))]
        try:
            report = classify_two_term(lead, mu, pert, k1, k2)
        except DegenerateSignError:
            deferred += 1
            continue
        if report.deferred:
            deferred += 1
            continue
        poly = TrigPolynomial(((1.0, lead), (mu, pert)))
        numeric = classify_numeric(poly, refine_critical_point(poly, report.location))
        compared += 1
        if numeric.trace_sign != report.trace_sign:
            disagreements.append((lead.label(), mu, pert.label(), k1, k2))
    assert disagreements == []
    assert compared + deferred == 200
    assert compared >= 20
