"""
Wyjątki biblioteki. Każdy dziedziczy po TorusDynamicsError oraz po odpowiednim
wyjątku wbudowanym, więc wywołujący może łapać jedno albo drugie.
"""
from __future__ import annotations

from typing import Any


class TorusDynamicsError(Exception):
    """Bazowy wyjątek analizy dynamiki na torusie."""


class AliasingError(TorusDynamicsError, ValueError):
    """Za mało węzłów siatki względem częstotliwości (warunek Nyquista)."""


class NotEnoughModesError(TorusDynamicsError, ValueError):
    """Tabela modów ma mniej niż s+1 modów dwuwymiarowych."""


class DegenerateSignError(TorusDynamicsError, ArithmeticError):
    """Jednostronna granica σ potrzebna do rozstrzygnięcia znaku jest zerem."""


class NoConvergenceError(TorusDynamicsError, RuntimeError):
    """Iteracja Newtona nie osiągnęła tolerancji."""


class LeftBasinError(TorusDynamicsError, RuntimeError):
    """Iteracja Newtona wyszła poza promień zaufania wokół punktu startowego."""


class NotACriticalPointError(TorusDynamicsError, ValueError):
    """Pole Nasha w punkcie nie jest (numerycznie) zerowe."""


class SingularPointError(TorusDynamicsError, ValueError):
    """Punkt leży na zbiorze osobliwym niezmiennika (log z ~0)."""


class GeneratorDomainError(TorusDynamicsError, ValueError):
    """Kwantyl generatora poza dziedziną λ ∈ [0, 1)."""


class FieldSpecError(TorusDynamicsError, ValueError):
    """Nieprawidłowa specyfikacja pola (gan / *.json / *.csv)."""


class NonFiniteFieldError(TorusDynamicsError, ArithmeticError):
    """Pole zwróciło wartość nieskończoną lub NaN."""

    def __init__(self, message: str, point: tuple[float, ...]) -> None:
        super().__init__("%s at %s" % (message, tuple(round(v, 12) for v in point)))
        self.point = point


class PipelineExhaustedError(TorusDynamicsError, RuntimeError):
    """Centra nie zniknęły do poziomu obcięcia max_s."""

    def __init__(self, message: str, result: dict[str, Any]) -> None:
        super().__init__(message)
        self.result = result
