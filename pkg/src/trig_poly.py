"""
Mody Fouriera Λ^{α,β}_{m1,m2} na torusie T² = [0,1)², wielomiany trygonometryczne,
ich gradienty i hesjany oraz dokładne (wymierne) punkty torusa.

Parzystość 0 = sinus, 1 = cosinus; argumenty trygonometryczne to 2π·m·θ.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterator, Union

import numpy as np

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class Parity(IntEnum):
    SIN = 0
    COS = 1

    def flip(self) -> Parity:
        return Parity(1 - int(self))


def parity_add(a: int, b: int) -> Parity:
    """Dodawanie w Z₂: 1 + 1 = 0."""
    return Parity((int(a) + int(b)) % 2)


@dataclass(frozen=True, order=True)
class TrigMode:
    """Funkcja bazowa trig(2π m1 θ1)·trig(2π m2 θ2)."""

    m1: int
    m2: int
    alpha: Parity = Parity.COS
    beta: Parity = Parity.COS

    def __post_init__(self) -> None:
        if int(self.m1) != self.m1 or int(self.m2) != self.m2 or self.m1 < 0 or self.m2 < 0:
            raise ValueError("Mode frequencies must be non-negative integers, got (%s, %s)" % (self.m1, self.m2))
        object.__setattr__(self, "m1", int(self.m1))
        object.__setattr__(self, "m2", int(self.m2))
        object.__setattr__(self, "alpha", Parity(int(self.alpha)))
        object.__setattr__(self, "beta", Parity(int(self.beta)))

    @classmethod
    def parse(cls, text: str) -> TrigMode:
        """'m1,m2,alpha,beta' → TrigMode (format flag CLI --lead / --pert)."""
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 4:
            raise ValueError("Mode must be 'm1,m2,alpha,beta', got %r" % text)
        m1, m2, a, b = (int(p) for p in parts)
        if a not in (0, 1) or b not in (0, 1):
            raise ValueError("Parities must be 0 or 1, got %r" % text)
        return cls(m1, m2, Parity(a), Parity(b))

    @property
    def is_zero(self) -> bool:
        # sinus przy częstotliwości 0 zeruje cały mod
        return (self.m1 == 0 and self.alpha == Parity.SIN) or (self.m2 == 0 and self.beta == Parity.SIN)

    @property
    def is_constant(self) -> bool:
        return self.m1 == 0 and self.m2 == 0 and not self.is_zero

    @property
    def is_two_dimensional(self) -> bool:
        return self.m1 >= 1 and self.m2 >= 1

    @property
    def max_frequency(self) -> int:
        return max(self.m1, self.m2)

    def label(self) -> str:
        return "(%d,%d,%d,%d)" % (self.m1, self.m2, int(self.alpha), int(self.beta))

    def to_dict(self) -> dict[str, int]:
        return {"m1": self.m1, "m2": self.m2, "alpha": int(self.alpha), "beta": int(self.beta)}


@dataclass(frozen=True)
class TorusPoint:
    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta1", _wrap_unit(self.theta1))
        object.__setattr__(self, "theta2", _wrap_unit(self.theta2))

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2], dtype=float)

    def shifted(self, d1: float, d2: float) -> TorusPoint:
        return TorusPoint(self.theta1 + d1, self.theta2 + d2)

    def to_list(self) -> list[float]:
        return [self.theta1, self.theta2]


@dataclass(frozen=True)
class RationalTorusPoint:
    """Dokładny punkt kratowy; współrzędne to ułamki zredukowane do [0,1)."""

    theta1: Fraction
    theta2: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta1", Fraction(self.theta1) % 1)
        object.__setattr__(self, "theta2", Fraction(self.theta2) % 1)

    @classmethod
    def parse(cls, theta1: str, theta2: str) -> RationalTorusPoint:
        return cls(Fraction(theta1), Fraction(theta2))

    def to_float(self) -> TorusPoint:
        return TorusPoint(float(self.theta1), float(self.theta2))

    def as_strings(self) -> list[str]:
        return [_fraction_str(self.theta1), _fraction_str(self.theta2)]


AnyPoint = Union[TorusPoint, RationalTorusPoint]


def torus_delta(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Najkrótsze przesunięcie b − a na okręgu, składowo w [−1/2, 1/2)."""
    d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    return (d + 0.5) % 1.0 - 0.5


def torus_distance(a: AnyPoint, b: AnyPoint) -> float:
    """Płaska metryka torusa: min(|Δ|, 1 − |Δ|) na osiach, złożone euklidesowo."""
    pa = a.to_float() if isinstance(a, RationalTorusPoint) else a
    pb = b.to_float() if isinstance(b, RationalTorusPoint) else b
    return float(np.hypot(*torus_delta(pa.as_array(), pb.as_array())))


def _wrap_unit(value: float) -> float:
    v = float(value) % 1.0
    # -1e-20 % 1.0 daje 1.0
    if v >= 1.0:
        v = 0.0
    return v


def _fraction_str(q: Fraction) -> str:
    return "%d/%d" % (q.numerator, q.denominator)


def _trig(parity: int, x: float) -> float:
    return math.sin(x) if parity == Parity.SIN else math.cos(x)


def _trig_array(parity: int, x: np.ndarray) -> np.ndarray:
    return np.sin(x) if parity == Parity.SIN else np.cos(x)


# sin/cos(2πq) dla q ≡ 0, 1/4, 1/2, 3/4 (mod 1)
_QUARTER_SIN = (0.0, 1.0, 0.0, -1.0)
_QUARTER_COS = (1.0, 0.0, -1.0, 0.0)


def trig_exact(parity: int, q: Fraction) -> float:
    """trig(2π q); dokładne 0/±1, gdy 4q jest całkowite."""
    q4 = q * 4
    if q4.denominator == 1:
        idx = q4.numerator % 4
        return _QUARTER_SIN[idx] if parity == Parity.SIN else _QUARTER_COS[idx]
    return _trig(parity, TWO_PI * float(q % 1))


def _coords(p: AnyPoint) -> tuple[float, float]:
    if isinstance(p, RationalTorusPoint):
        return float(p.theta1), float(p.theta2)
    return p.theta1, p.theta2


def mode_eval(mode: TrigMode, p: AnyPoint) -> float:
    if isinstance(p, RationalTorusPoint):
        return mode_eval_exact(mode, p)
    t1, t2 = _coords(p)
    return _trig(mode.alpha, TWO_PI * mode.m1 * t1) * _trig(mode.beta, TWO_PI * mode.m2 * t2)


def mode_eval_exact(mode: TrigMode, p: RationalTorusPoint) -> float:
    return trig_exact(mode.alpha, mode.m1 * p.theta1) * trig_exact(mode.beta, mode.m2 * p.theta2)


def mode_eval_array(mode: TrigMode, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
    return _trig_array(mode.alpha, TWO_PI * mode.m1 * theta1) * _trig_array(mode.beta, TWO_PI * mode.m2 * theta2)


def mode_partial(mode: TrigMode, axis: int) -> tuple[float, TrigMode]:
    """∂/∂θ_axis Λ^{α,β} = (−1)^parity · 2π · m · Λ z odwróconą parzystością na tej osi."""
    if axis == 1:
        sign = -1.0 if mode.alpha == Parity.COS else 1.0
        return sign * TWO_PI * mode.m1, TrigMode(mode.m1, mode.m2, mode.alpha.flip(), mode.beta)
    if axis == 2:
        sign = -1.0 if mode.beta == Parity.COS else 1.0
        return sign * TWO_PI * mode.m2, TrigMode(mode.m1, mode.m2, mode.alpha, mode.beta.flip())
    raise ValueError("axis must be 1 or 2, got %r" % axis)


@dataclass(frozen=True)
class TrigPolynomial:
    """
    Skończona suma c·Λ. Przy konstrukcji scala powtarzające się mody, usuwa
    współczynniki równe 0 i mody tożsamościowo zerowe. Kolejność pierwszego
    wystąpienia jest zachowana (mod wiodący pozostaje pierwszy).
    """

    terms: tuple[tuple[float, TrigMode], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        merged: dict[TrigMode, float] = {}
        for coeff, mode in self.terms:
            if not isinstance(mode, TrigMode):
                raise TypeError("TrigPolynomial terms must be (coeff, TrigMode) pairs")
            if mode.is_zero:
                continue
            merged[mode] = merged.get(mode, 0.0) + float(coeff)
        object.__setattr__(self, "terms", tuple((c, m) for m, c in merged.items() if c != 0.0))

    @classmethod
    def from_mode(cls, mode: TrigMode, coeff: float = 1.0) -> TrigPolynomial:
        return cls(((coeff, mode),))

    @classmethod
    def constant(cls, value: float) -> TrigPolynomial:
        return cls(((value, TrigMode(0, 0, Parity.COS, Parity.COS)),))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[float, TrigMode]]:
        return iter(self.terms)

    def __add__(self, other: TrigPolynomial) -> TrigPolynomial:
        return TrigPolynomial(self.terms + other.terms)

    def scaled(self, factor: float) -> TrigPolynomial:
        return TrigPolynomial(tuple((c * factor, m) for c, m in self.terms))

    def coefficient(self, mode: TrigMode) -> float:
        for c, m in self.terms:
            if m == mode:
                return c
        return 0.0

    def max_frequency(self) -> int:
        return max((m.max_frequency for _, m in self.terms), default=0)

    def leading_two_dimensional_term(self) -> tuple[float, TrigMode] | None:
        """Składnik 2D o największym |c| (przy remisie pierwszy w kolejności)."""
        best: tuple[float, TrigMode] | None = None
        for c, m in self.terms:
            if m.is_two_dimensional and (best is None or abs(c) > abs(best[0])):
                best = (c, m)
        return best

    # CostField
    def evaluate(self, p: AnyPoint) -> float:
        return poly_eval(self, p)

    def evaluate_array(self, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
        theta1 = np.asarray(theta1, dtype=float)
        theta2 = np.asarray(theta2, dtype=float)
        out = np.zeros(np.broadcast(theta1, theta2).shape)
        for c, m in self.terms:
            out += c * mode_eval_array(m, theta1, theta2)
        return out

    def gradient(self, p: AnyPoint) -> np.ndarray:
        return np.array(poly_gradient(self, p))

    def gradient_array(self, theta1: np.ndarray, theta2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        theta1 = np.asarray(theta1, dtype=float)
        theta2 = np.asarray(theta2, dtype=float)
        shape = np.broadcast(theta1, theta2).shape
        g1 = np.zeros(shape)
        g2 = np.zeros(shape)
        for c, m in self.terms:
            s1, d1 = mode_partial(m, 1)
            s2, d2 = mode_partial(m, 2)
            if s1:
                g1 += c * s1 * mode_eval_array(d1, theta1, theta2)
            if s2:
                g2 += c * s2 * mode_eval_array(d2, theta1, theta2)
        return g1, g2

    def hessian(self, p: AnyPoint) -> np.ndarray:
        return poly_hessian(self, p)

    def to_dict(self) -> dict[str, Any]:
        return {"terms": [{**m.to_dict(), "coeff": c} for c, m in self.terms]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrigPolynomial:
        terms = []
        for t in data.get("terms", []):
            mode = TrigMode(int(t["m1"]), int(t["m2"]), Parity(int(t["alpha"])), Parity(int(t["beta"])))
            terms.append((float(t["coeff"]), mode))
        return cls(tuple(terms))

    def describe(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("%.6g*L%s" % (c, m.label()) for c, m in self.terms)


def poly_eval(poly: TrigPolynomial, p: AnyPoint) -> float:
    return math.fsum(c * mode_eval(m, p) for c, m in poly.terms)


def poly_gradient(poly: TrigPolynomial, p: AnyPoint) -> tuple[float, float]:
    g1 = 0.0
    g2 = 0.0
    for c, m in poly.terms:
        s1, d1 = mode_partial(m, 1)
        s2, d2 = mode_partial(m, 2)
        if s1:
            g1 += c * s1 * mode_eval(d1, p)
        if s2:
            g2 += c * s2 * mode_eval(d2, p)
    return g1, g2


def poly_hessian(poly: TrigPolynomial, p: AnyPoint) -> np.ndarray:
    h11 = h12 = h22 = 0.0
    for c, m in poly.terms:
        s1, d1 = mode_partial(m, 1)
        s2, d2 = mode_partial(m, 2)
        if s1:
            s11, d11 = mode_partial(d1, 1)
            s12, d12 = mode_partial(d1, 2)
            h11 += c * s1 * s11 * mode_eval(d11, p)
            if s12:
                h12 += c * s1 * s12 * mode_eval(d12, p)
        if s2:
            s22, d22 = mode_partial(d2, 2)
            h22 += c * s2 * s22 * mode_eval(d22, p)
    # h12 liczone raz, więc macierz jest dokładnie symetryczna
    return np.array([[h11, h12], [h12, h22]])


def load_polynomial(path: Path | str) -> TrigPolynomial:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    poly = TrigPolynomial.from_dict(data)
    logger.debug("Loaded polynomial with %d terms from %s", len(poly), path)
    return poly


def save_polynomial(poly: TrigPolynomial, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(poly.to_dict(), f, ensure_ascii=False, indent=2)
    return path
