"""
Pole Nasha N(F) = (+∂F/∂θ1, −∂F/∂θ2) i jego różniczka (hesjan Nasha), spis punktów
krytycznych modów bazowych, przepływ modów jednowymiarowych, doprecyzowanie Newtonem,
klasyfikacja po wartościach własnych oraz suma Poincarégo–Hopfa.

Oś 1 maksymalizuje (dyskryminator), oś 2 minimalizuje (generator).
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Union

import numpy as np

import config
from src.errors import LeftBasinError, NoConvergenceError, NotACriticalPointError
from src.spectral import CostField
from src.trig_poly import (
    AnyPoint,
    Parity,
    RationalTorusPoint,
    TorusPoint,
    TrigMode,
    TrigPolynomial,
    poly_gradient,
    poly_hessian,
    torus_delta,
)

logger = logging.getLogger(__name__)

Field = Union[TrigPolynomial, CostField]

# |det| hesjanu Nasha poniżej progu = macierz osobliwa dla Newtona
SINGULAR_DET = 1e-10
# względny próg zerowej wartości własnej (punkt zdegenerowany)
DEGENERATE_RTOL = 1e-6
# maksymalna norma pola Nasha w punkcie uznawanym za krytyczny
CRITICAL_RESIDUAL = 1e-8


class Classification(str, Enum):
    SADDLE = "Saddle"
    CENTER = "Center"
    SPIRAL_ATTRACTOR = "SpiralAttractor"
    SPIRAL_REPULSOR = "SpiralRepulsor"
    ATTRACTING_NODE = "AttractingNode"
    REPELLING_NODE = "RepellingNode"
    DEGENERATE = "Degenerate"

    @property
    def is_attracting(self) -> bool:
        return self in (Classification.SPIRAL_ATTRACTOR, Classification.ATTRACTING_NODE)


class PointType(str, Enum):
    I = "I"
    II = "II"
    OTHER = "other"


@dataclass(frozen=True)
class SignTriple:
    """Znaki A, B1, B2 (każdy z {−1, 0, +1}) decydujące o kierunku przesunięcia punktu krytycznego."""

    A: int
    B1: int
    B2: int

    def __post_init__(self) -> None:
        for v in (self.A, self.B1, self.B2):
            if v not in (-1, 0, 1):
                raise ValueError("Sign triple values must be -1, 0 or 1, got %r" % (v,))

    def to_dict(self) -> dict[str, int]:
        return {"A": self.A, "B1": self.B1, "B2": self.B2}


@dataclass(frozen=True)
class NashHessian:
    entries: np.ndarray
    trace: float
    eigenvalues: tuple[complex, complex]

    @property
    def det(self) -> float:
        e = self.entries
        return float(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])


@dataclass
class CriticalPointReport:
    location: TorusPoint | RationalTorusPoint
    point_type: PointType
    classification: Classification
    eigen: tuple[complex, complex]
    morse_index: int | None
    trace_sign: int
    lattice_indices: tuple[int, int] | None = None
    deferred: bool = False
    sign_triple: SignTriple | None = None
    residual: float | None = None
    note: str | None = None

    def to_dict(self) -> dict[str, Any]:
        loc = self.location
        location: list[Any] = loc.as_strings() if isinstance(loc, RationalTorusPoint) else [
            round(loc.theta1, config.FLOAT_DIGITS + 6),
            round(loc.theta2, config.FLOAT_DIGITS + 6),
        ]
        out: dict[str, Any] = {
            "location": location,
            "lattice_indices": list(self.lattice_indices) if self.lattice_indices is not None else None,
            "point_type": self.point_type.value,
            "classification": self.classification.value,
            "eigen": [[_fmt(z.real), _fmt(z.imag)] for z in self.eigen],
            "morse_index": self.morse_index,
            "trace_sign": self.trace_sign,
            "deferred": self.deferred,
        }
        if self.sign_triple is not None:
            out["sign_triple"] = self.sign_triple.to_dict()
        if self.residual is not None:
            out["residual"] = float("%.3e" % self.residual)
        if self.note:
            out["note"] = self.note
        return out


def _fmt(x: float) -> float:
    # stała precyzja → deterministyczny JSON
    return float("%.*e" % (config.FLOAT_DIGITS + 3, x)) if x else 0.0


def _sign(x: float, tol: float = 0.0) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def eigenvalues_2x2(m: np.ndarray) -> tuple[complex, complex]:
    """Postać zamknięta: λ = tr/2 ± sqrt(tr²/4 − det)."""
    tr = float(m[0, 0] + m[1, 1])
    det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = tr * tr / 4.0 - det
    root = cmath.sqrt(disc)
    if disc >= 0:
        root = complex(root.real, 0.0)
    else:
        root = complex(0.0, root.imag)
    half = complex(tr / 2.0, 0.0)
    return half + root, half - root


def _as_float_point(p: AnyPoint) -> TorusPoint:
    return p.to_float() if isinstance(p, RationalTorusPoint) else p


def field_gradient(f: Field, p: AnyPoint, h: float | None = None) -> np.ndarray:
    """Gradient analityczny dla wielomianu, różnice centralne dla pola czarnej skrzynki."""
    if isinstance(f, TrigPolynomial):
        return np.array(poly_gradient(f, p))
    h = h or config.FD_STEP
    q = _as_float_point(p)
    t1 = np.array([q.theta1 + h, q.theta1 - h, q.theta1, q.theta1])
    t2 = np.array([q.theta2, q.theta2, q.theta2 + h, q.theta2 - h])
    v = np.asarray(f.evaluate_array(t1, t2), dtype=float)
    return np.array([(v[0] - v[1]) / (2 * h), (v[2] - v[3]) / (2 * h)])


def field_hessian(f: Field, p: AnyPoint, h: float | None = None) -> np.ndarray:
    if isinstance(f, TrigPolynomial):
        return poly_hessian(f, p)
    h = h or config.FD_STEP
    q = _as_float_point(p)
    a, b = q.theta1, q.theta2
    t1 = np.array([a, a + h, a - h, a, a, a + h, a + h, a - h, a - h])
    t2 = np.array([b, b, b, b + h, b - h, b + h, b - h, b + h, b - h])
    v = np.asarray(f.evaluate_array(t1, t2), dtype=float)
    h11 = (v[1] - 2 * v[0] + v[2]) / (h * h)
    h22 = (v[3] - 2 * v[0] + v[4]) / (h * h)
    h12 = (v[5] - v[6] - v[7] + v[8]) / (4 * h * h)
    return np.array([[h11, h12], [h12, h22]])


def nash_field(poly: Field, p: AnyPoint) -> tuple[float, float]:
    g = field_gradient(poly, p)
    return float(g[0]), float(-g[1])


def nash_matrix(hessian: np.ndarray) -> np.ndarray:
    """Hesjan z zanegowanym dolnym wierszem."""
    return np.array([[hessian[0, 0], hessian[0, 1]], [-hessian[1, 0], -hessian[1, 1]]])


def nash_hessian(poly: Field, p: AnyPoint) -> NashHessian:
    m = nash_matrix(field_hessian(poly, p))
    return NashHessian(entries=m, trace=float(m[0, 0] + m[1, 1]), eigenvalues=eigenvalues_2x2(m))


def morse_index(hessian: np.ndarray) -> int | None:
    """Liczba ujemnych wartości własnych zwykłego hesjanu; None gdy zdegenerowany."""
    w = np.linalg.eigvalsh(hessian)
    scale = float(np.max(np.abs(w)))
    if scale == 0.0 or float(np.min(np.abs(w))) <= DEGENERATE_RTOL * scale:
        return None
    return int(np.sum(w < 0))


def classify_eigen(eig: tuple[complex, complex], center_tol: float) -> Classification:
    l1, l2 = eig
    scale = max(abs(l1), abs(l2))
    if scale == 0.0:
        return Classification.DEGENERATE
    if l1.imag != 0.0:
        re, im = l1.real, abs(l1.imag)
        if abs(re) <= center_tol * im:
            return Classification.CENTER
        return Classification.SPIRAL_ATTRACTOR if re < 0 else Classification.SPIRAL_REPULSOR
    a, b = l1.real, l2.real
    if min(abs(a), abs(b)) <= DEGENERATE_RTOL * scale:
        return Classification.DEGENERATE
    if a * b < 0:
        return Classification.SADDLE
    return Classification.ATTRACTING_NODE if a < 0 else Classification.REPELLING_NODE


def type_i_point(mode: TrigMode, k1: int, k2: int) -> RationalTorusPoint:
    return RationalTorusPoint(
        Fraction(2 * k1 - int(mode.alpha) + 1, 4 * mode.m1),
        Fraction(2 * k2 - int(mode.beta) + 1, 4 * mode.m2),
    )


def type_ii_point(mode: TrigMode, k1: int, k2: int) -> RationalTorusPoint:
    return RationalTorusPoint(
        Fraction(2 * k1 + int(mode.alpha), 4 * mode.m1),
        Fraction(2 * k2 + int(mode.beta), 4 * mode.m2),
    )


def lattice_indices(mode: TrigMode) -> list[tuple[int, int]]:
    return [(k1, k2) for k1 in range(2 * mode.m1) for k2 in range(2 * mode.m2)]


@dataclass
class LatticeCensus:
    mode: TrigMode
    reports: list[CriticalPointReport]
    zero_count: int

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)

    def of_type(self, point_type: PointType) -> list[CriticalPointReport]:
        return [r for r in self.reports if r.point_type == point_type]


def basis_critical_points(mode: TrigMode) -> LatticeCensus:
    """8·m1·m2 dokładnych punktów: typ I (siodła przepływu) i typ II (centra)."""
    if not mode.is_two_dimensional:
        raise ValueError("basis_critical_points needs m1, m2 >= 1, got %s" % mode.label())
    poly = TrigPolynomial.from_mode(mode)
    reports: list[CriticalPointReport] = []
    for point_type, locate in ((PointType.I, type_i_point), (PointType.II, type_ii_point)):
        for k1, k2 in lattice_indices(mode):
            p = locate(mode, k1, k2)
            nh = nash_hessian(poly, p)
            cls = classify_eigen(nh.eigenvalues, 0.0)
            reports.append(
                CriticalPointReport(
                    location=p,
                    point_type=point_type,
                    classification=cls,
                    eigen=nh.eigenvalues,
                    morse_index=morse_index(poly_hessian(poly, p)),
                    trace_sign=_sign(nh.trace),
                    lattice_indices=(k1, k2),
                )
            )
    return LatticeCensus(mode=mode, reports=reports, zero_count=4 * mode.m1 * mode.m2)


@dataclass
class SingleAxisFlow:
    orientation: str
    critical_lines: list[Fraction] = field(default_factory=list)
    attracting_flags: list[bool] = field(default_factory=list)


def single_axis_flow(mode: TrigMode) -> SingleAxisFlow:
    """
    Mod zależny od jednej zmiennej (parzystość osi o częstotliwości 0 jest pomijana).
    Na osi 1 przyciągają maksima, na osi 2 minima (minus w polu Nasha).
    """
    if mode.is_two_dimensional:
        raise ValueError("single_axis_flow needs a zero frequency, got %s" % mode.label())
    if mode.m1 == 0 and mode.m2 == 0:
        return SingleAxisFlow("constant")
    if mode.m2 == 0:
        m, parity, orientation = mode.m1, int(mode.alpha), "horizontal"
    else:
        m, parity, orientation = mode.m2, int(mode.beta), "vertical"
    lines: list[Fraction] = []
    flags: list[bool] = []
    for k in range(2 * m):
        lines.append(Fraction(2 * k - parity + 1, 4 * m) % 1)
        # wartość modu na linii to (−1)^k
        is_max = k % 2 == 0
        flags.append(is_max if orientation == "horizontal" else not is_max)
    order = sorted(range(len(lines)), key=lambda i: lines[i])
    return SingleAxisFlow(orientation, [lines[i] for i in order], [flags[i] for i in order])


def trust_radius_for(f: Field) -> float:
    if isinstance(f, TrigPolynomial):
        k = f.max_frequency()
        return math.inf if k == 0 else 1.0 / (8.0 * k)
    return 1.0 / 8.0


def refine_critical_point(
    poly: Field,
    guess: AnyPoint,
    tol: float | None = None,
    max_iter: int | None = None,
    *,
    trust_radius: float | None = None,
) -> TorusPoint:
    """Newton na polu Nasha z hesjanem Nasha jako jakobianem."""
    if tol is None:
        tol = config.NEWTON_TOL if isinstance(poly, TrigPolynomial) else config.NEWTON_TOL_FD
    max_iter = config.NEWTON_MAX_ITER if max_iter is None else max_iter
    radius = trust_radius_for(poly) if trust_radius is None else trust_radius
    start = _as_float_point(guess).as_array()
    x = start.copy()
    for it in range(max_iter + 1):
        p = TorusPoint(x[0], x[1])
        n = np.array(nash_field(poly, p))
        res = float(np.hypot(n[0], n[1]))
        if res <= tol:
            logger.debug("Newton converged in %d iterations (residual %.2e)", it, res)
            return p
        if it == max_iter:
            break
        j = nash_matrix(field_hessian(poly, p))
        det = float(j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0])
        if abs(det) <= SINGULAR_DET:
            raise NoConvergenceError("Singular Nash Hessian at %s (det %.2e, residual %.2e)" % (p.to_list(), det, res))
        x = x + np.linalg.solve(j, -n)
        if float(np.hypot(*torus_delta(start, x))) > radius:
            raise LeftBasinError("Newton left trust radius %.4g around %s" % (radius, start.tolist()))
    raise NoConvergenceError("No convergence after %d iterations (residual %.2e)" % (max_iter, res))


def classify_numeric(
    poly: Field,
    p: AnyPoint,
    center_tol: float | None = None,
    *,
    residual_tol: float | None = None,
) -> CriticalPointReport:
    center_tol = config.CENTER_TOL if center_tol is None else center_tol
    if residual_tol is None:
        # różnice skończone na skwantowanym cache nie zejdą poniżej ~1e-9
        residual_tol = CRITICAL_RESIDUAL if isinstance(poly, TrigPolynomial) else 100 * config.NEWTON_TOL_FD
    n = nash_field(poly, p)
    res = math.hypot(*n)
    if res > residual_tol:
        raise NotACriticalPointError("Nash field residual %.2e at %s exceeds %.1e" % (res, _as_float_point(p).to_list(), residual_tol))
    hess = field_hessian(poly, p)
    nh = nash_hessian(poly, p)
    cls = classify_eigen(nh.eigenvalues, center_tol)
    trace_sign = 0 if cls == Classification.CENTER else _sign(nh.trace)
    return CriticalPointReport(
        location=p,
        point_type=PointType.OTHER,
        classification=cls,
        eigen=nh.eigenvalues,
        morse_index=morse_index(hess),
        trace_sign=trace_sign,
        residual=res,
    )


@dataclass(frozen=True)
class PoincareHopfAudit:
    """Suma indeksów po punktach niezdegenerowanych; skipped > 0 oznacza sumę częściową."""

    index_sum: int
    counted: int
    skipped: int

    @property
    def complete(self) -> bool:
        return self.skipped == 0

    @property
    def passed(self) -> bool:
        return self.complete and self.index_sum == 0

    def to_dict(self) -> dict[str, int | bool]:
        return {"index_sum": self.index_sum, "counted": self.counted, "skipped": self.skipped, "passed": self.passed}


def poincare_hopf_audit(reports: list[CriticalPointReport]) -> PoincareHopfAudit:
    """Σ(−1)^index; 0 jest zgodne z χ(T²) = 0. Punkty zdegenerowane (bez indeksu Morse'a) są liczone osobno."""
    indices = [r.morse_index for r in reports if r.morse_index is not None]
    skipped = len(reports) - len(indices)
    if skipped:
        logger.warning("Poincare-Hopf audit skips %d degenerate points; the sum is partial", skipped)
    return PoincareHopfAudit(sum((-1) ** i for i in indices), len(indices), skipped)


def _same_point(a: TorusPoint, b: TorusPoint, tol: float) -> bool:
    return float(np.hypot(*torus_delta(a.as_array(), b.as_array()))) <= tol


def lattice_critical_points(
    poly: TrigPolynomial,
    *,
    center_tol: float | None = None,
    tol: float | None = None,
) -> list[CriticalPointReport]:
    """
    Punkty krytyczne wielomianu: siatka modu wiodącego 2D jako punkty startowe,
    Newton, potem klasyfikacja numeryczna. Duplikaty po zbieżności są usuwane.
    """
    lead = poly.leading_two_dimensional_term()
    if lead is None:
        if len(poly):
            logger.warning("Polynomial has no two-dimensional term; critical set is not isolated")
        return []
    census = basis_critical_points(lead[1])
    reports: list[CriticalPointReport] = []
    seen: list[TorusPoint] = []
    for seed in census:
        try:
            p = refine_critical_point(poly, seed.location, tol)
            report = classify_numeric(poly, p, center_tol)
        except (NoConvergenceError, LeftBasinError) as e:
            logger.warning("Lattice seed %s (%s): %s", seed.location.as_strings(), seed.point_type.value, e)
            raise
        if any(_same_point(p, q, 1e-9) for q in seen):
            continue
        seen.append(p)
        report.point_type = seed.point_type
        report.lattice_indices = seed.lattice_indices
        reports.append(report)
    return reports


def refine_seeds(
    f: Field,
    seeds: list[CriticalPointReport],
    *,
    center_tol: float | None = None,
) -> list[CriticalPointReport]:
    """Jak lattice_critical_points, ale dla dowolnego pola; nieudane punkty startowe są pomijane."""
    reports: list[CriticalPointReport] = []
    seen: list[TorusPoint] = []
    for seed in seeds:
        try:
            p = refine_critical_point(f, seed.location)
            report = classify_numeric(f, p, center_tol)
        except (NoConvergenceError, LeftBasinError, NotACriticalPointError) as e:
            logger.warning("Seed %s skipped: %s", _as_float_point(seed.location).to_list(), e)
            continue
        if any(_same_point(p, q, 1e-6) for q in seen):
            continue
        seen.append(p)
        report.point_type = seed.point_type
        report.lattice_indices = seed.lattice_indices
        reports.append(report)
    return reports
