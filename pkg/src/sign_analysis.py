"""
Rozstrzyganie losu centrów typu II po zaburzeniu dokładną arytmetyką znaków.

Θ = Λ^{α,β}_{m1,m2} + μ·Λ^{γ,δ}_{n1,n2}. Ślad hesjanu Nasha to operator falowy
∂²/∂θ1² − ∂²/∂θ2², więc dla każdego modu wnosi 4π²·c·(n2² − n1²)·Λ. Znak śladu
w (przesuniętym) punkcie krytycznym rozstrzyga: ujemny = spirala przyciągająca.

σ⁰, σ¹ to znaki sin(2πθ) i cos(2πθ) z granicami jednostronnymi, liczone na ułamkach.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from src.dynamics import (
    Classification,
    CriticalPointReport,
    PointType,
    SignTriple,
    nash_hessian,
    type_ii_point,
)
from src.errors import DegenerateSignError
from src.trig_poly import Parity, TrigMode, TrigPolynomial, mode_eval, mode_partial, parity_add, poly_gradient

logger = logging.getLogger(__name__)

# względny próg, poniżej którego suma z wartościami niewymiernymi jest zerem
CANCEL_RTOL = 1e-12


@dataclass(frozen=True)
class OneSidedSign:
    left: int
    value: int
    right: int

    def towards(self, direction: int) -> int:
        """Znak tuż obok punktu w kierunku direction (0 = w samym punkcie)."""
        if direction > 0:
            return self.right
        if direction < 0:
            return self.left
        return self.value


def sigma(parity: int, theta: Fraction) -> OneSidedSign:
    t = Fraction(theta) % 1
    if int(parity) == Parity.SIN:
        if t == 0:
            return OneSidedSign(-1, 0, 1)
        if t == Fraction(1, 2):
            return OneSidedSign(1, 0, -1)
        v = 1 if t < Fraction(1, 2) else -1
        return OneSidedSign(v, v, v)
    if t == Fraction(1, 4):
        return OneSidedSign(1, 0, -1)
    if t == Fraction(3, 4):
        return OneSidedSign(-1, 0, 1)
    v = 1 if (t < Fraction(1, 4) or t > Fraction(3, 4)) else -1
    return OneSidedSign(v, v, v)


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _verdict(s: int) -> Classification:
    if s < 0:
        return Classification.SPIRAL_ATTRACTOR
    if s > 0:
        return Classification.SPIRAL_REPULSOR
    return Classification.CENTER


def _check_two_term(lead: TrigMode, mu: float, pert: TrigMode) -> None:
    if not abs(mu) < 1:
        raise ValueError("Perturbation weight must satisfy |mu| < 1, got %r" % mu)
    if not (lead.is_two_dimensional and pert.is_two_dimensional):
        raise ValueError("Both modes need frequencies >= 1, got %s and %s" % (lead.label(), pert.label()))


def classify_two_term(lead: TrigMode, mu: float, pert: TrigMode, k1: int, k2: int) -> CriticalPointReport:
    """
    Punkt typu II modu lead pod zaburzeniem μ·pert. Gradient zerowy: znak
    μ·σ^γ(n1θ1⁰)·σ^δ(n2θ2⁰)·(n2² − n1²). Gradient niezerowy: przesunięcie o
    (sign(AB1)ε1, sign(AB2)ε2) i ten sam iloczyn z jednostronnymi granicami σ.
    Zero lub brak kierunku przesunięcia → Center z decyzją odroczoną.
    """
    _check_two_term(lead, mu, pert)
    p0 = type_ii_point(lead, k1, k2)
    poly = TrigPolynomial(((1.0, lead), (mu, pert)))
    n1, n2 = pert.m1, pert.m2
    gamma, delta = pert.alpha, pert.beta
    x1 = p0.theta1 * n1
    x2 = p0.theta2 * n2
    w = _sign(n2 * n2 - n1 * n1)
    g = poly_gradient(poly, p0)
    triple: SignTriple | None = None

    if g[0] == 0.0 and g[1] == 0.0:
        s = _sign(mu) * sigma(gamma, x1).value * sigma(delta, x2).value * w
        note = "gradient zero at lattice point"
    else:
        lead_sign = (-1) ** (k1 + k2 + int(lead.alpha) + int(lead.beta))
        s_g1 = sigma(parity_add(gamma, 1), x1).value
        s_d1 = sigma(parity_add(delta, 1), x2).value
        s_g = sigma(gamma, x1).value
        s_d = sigma(delta, x2).value
        a = (-1) ** int(gamma) * mu * n1 * s_g1 * s_d
        b1 = mu * s_g * s_d
        b2 = lead_sign * lead.m1 * lead.m2 + (-1) ** (int(delta) + int(gamma)) * mu * n1 * n2 * s_g1 * s_d1
        triple = SignTriple(_sign(a), _sign(b1), _sign(b2))
        d1 = triple.A * triple.B1
        d2 = triple.A * triple.B2
        if d1 == 0 or d2 == 0:
            s = 0
            note = "displacement direction undetermined"
        else:
            side1 = sigma(gamma, x1).towards(d1)
            side2 = sigma(delta, x2).towards(d2)
            if side1 == 0 or side2 == 0:
                raise DegenerateSignError("Zero one-sided sigma limit at %s" % p0.as_strings())
            s = _sign(mu) * side1 * side2 * w
            note = "displaced critical point"

    cls = _verdict(s)
    nh = nash_hessian(poly, p0)
    return CriticalPointReport(
        location=p0,
        point_type=PointType.II,
        classification=cls,
        eigen=nh.eigenvalues,
        morse_index=1,
        trace_sign=s,
        lattice_indices=(k1, k2),
        deferred=cls == Classification.CENTER,
        sign_triple=triple,
        note=note,
    )


def _mode_gradient(mode: TrigMode, p) -> tuple[float, float]:
    s1, d1 = mode_partial(mode, 1)
    s2, d2 = mode_partial(mode, 2)
    return (s1 * mode_eval(d1, p) if s1 else 0.0, s2 * mode_eval(d2, p) if s2 else 0.0)


def _is_cancelled(total: float, magnitude: float) -> bool:
    return total == 0.0 or abs(total) <= CANCEL_RTOL * magnitude


def classify_truncation(poly: TrigPolynomial, k1: int, k2: int) -> CriticalPointReport:
    """
    Ta sama analiza dla całego obcięcia Θ = κΛ + Σ μ_j Λ_j, punkt typu II (k1, k2) modu wiodącego.

    Rząd 1: T1 = Σ μ_j (n2² − n1²) Λ_j(θ⁰). Gdy T1 = 0, a ∇Θ(θ⁰) = G ≠ 0, punkt przesuwa się
    o ε = −H⁻¹G z H = [[0, h], [h, 0]] hesjanem κΛ, czyli ε = (−G2/h, −G1/h), i decyduje rząd 2:
    T2 = (m2² − m1²)·h·ε1ε2 + Σ μ_j (n2² − n1²) ∇Λ_j(θ⁰)·ε.
    Trójka znaków: A = sign h, B1 = sign(−G2), B2 = sign(−G1), więc sign ε_i = A·B_i.
    """
    lead_term = poly.leading_two_dimensional_term()
    if lead_term is None:
        raise ValueError("Truncation has no two-dimensional leading mode")
    kappa, lead = lead_term
    p0 = type_ii_point(lead, k1, k2)
    perts = [(c, m) for c, m in poly.terms if m != lead and not m.is_constant]

    h = kappa * (-1) ** (k1 + k2 + int(lead.alpha) + int(lead.beta)) * 4.0 * math.pi**2 * lead.m1 * lead.m2
    t1 = 0.0
    t1_mag = 0.0
    g = [0.0, 0.0]
    g_mag = 0.0
    rows: list[tuple[float, int, tuple[float, float]]] = []
    for mu, mode in perts:
        w = mode.m2**2 - mode.m1**2
        value = mode_eval(mode, p0)
        grad = _mode_gradient(mode, p0)
        t1 += mu * w * value
        t1_mag += abs(mu * w * value)
        g[0] += mu * grad[0]
        g[1] += mu * grad[1]
        g_mag += abs(mu) * (abs(grad[0]) + abs(grad[1]))
        rows.append((mu, w, grad))

    grad_zero = _is_cancelled(abs(g[0]) + abs(g[1]), g_mag)
    triple = None if grad_zero else SignTriple(_sign(h), _sign(-g[1]), _sign(-g[0]))

    if not _is_cancelled(t1, t1_mag):
        s = _sign(t1)
        note = "first-order trace %.6e" % t1
    elif grad_zero:
        s = 0
        note = "gradient and first-order trace vanish"
    else:
        e1 = -g[1] / h
        e2 = -g[0] / h
        lead_part = (lead.m2**2 - lead.m1**2) * h * e1 * e2
        parts = [lead_part] + [mu * w * (grad[0] * e1 + grad[1] * e2) for mu, w, grad in rows]
        t2 = math.fsum(parts)
        if _is_cancelled(t2, sum(abs(x) for x in parts)):
            s = 0
            note = "second-order trace vanishes"
        else:
            s = _sign(t2)
            note = "second-order trace %.6e" % t2

    cls = _verdict(s)
    nh = nash_hessian(poly, p0)
    return CriticalPointReport(
        location=p0,
        point_type=PointType.II,
        classification=cls,
        eigen=nh.eigenvalues,
        morse_index=1,
        trace_sign=s,
        lattice_indices=(k1, k2),
        deferred=cls == Classification.CENTER,
        sign_triple=triple,
        note=note,
    )


def par(n: int) -> int:
    """Waluacja 2-adyczna: par(12) = 2."""
    if n < 1:
        raise ValueError("par needs a positive integer, got %r" % n)
    return (n & -n).bit_length() - 1


def _axis_vanishes(m: int, n: int, parity: int) -> bool:
    # sinus (parzystość 0) na siatce wymaga par(m) ≥ par(n) + 1, cosinus par(m) ≤ par(n) − 1
    if int(parity) == Parity.SIN:
        return par(m) >= par(n) + 1
    return par(m) <= par(n) - 1


def vanishing_criterion(m1: int, m2: int, n1: int, n2: int, alpha: int, beta: int) -> bool:
    """Czy Λ^{α+1,β+1}_{n1,n2} zeruje się w jakimś punkcie typu II modu Λ^{α,β}_{m1,m2}."""
    for v in (m1, m2, n1, n2):
        if v < 1:
            raise ValueError("Frequencies must be >= 1, got %r" % ((m1, m2, n1, n2),))
    return _axis_vanishes(m1, n1, alpha) or _axis_vanishes(m2, n2, beta)
