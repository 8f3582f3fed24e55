"""
Widmo Fouriera okresowego pola kosztu na T²: kwadratura prostokątna dla pojedynczego
modu, FFT na jednorodnej siatce, reguła prostokątów na siatce domkniętej (z węzłem θ = 1),
tabela modów posortowana malejąco po |a|, obcięcie Θ_s i rozkład na superpozycję Δ1(θ1) + Δ2(θ2) + Θ(θ1,θ2).

Siatka: values[i][j] = F(i/n1, j/n2), wiersz = indeks osi 1; siatka domknięta: F(i/(n1−1), j/(n2−1)).
"""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Protocol, Sequence, runtime_checkable

import numpy as np

import config
from src.errors import AliasingError, NonFiniteFieldError, NotEnoughModesError
from src.trig_poly import AnyPoint, Parity, TorusPoint, TrigMode, TrigPolynomial, mode_eval_array

logger = logging.getLogger(__name__)

# względny próg, poniżej którego biny FFT traktujemy jako zero
FFT_DROP_RTOL = 1e-12
# kwant |a| przy rozstrzyganiu remisów w sortowaniu
TIE_QUANTUM = 1e-12

CSV_HEADER = ["m1", "m2", "alpha", "beta", "coeff", "ratio"]


class Quadrature(str, Enum):
    # fft: siatka okresowa i/n; rectangular: siatka domknięta linspace(0, 1, n), wszystkie węzły z wagą h²
    FFT = "fft"
    RECTANGULAR = "rectangular"


@runtime_checkable
class CostField(Protocol):
    """Okresowe pole skalarne na T²; evaluate musi być bezpieczne wielowątkowo."""

    def evaluate(self, p: AnyPoint) -> float: ...

    def evaluate_array(self, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray: ...


def _axis(n: int, endpoint: bool) -> np.ndarray:
    return np.linspace(0.0, 1.0, n) if endpoint else np.arange(n) / n


@dataclass(frozen=True)
class GridSamples:
    n1: int
    n2: int
    values: np.ndarray
    endpoint: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("Grid needs n1, n2 >= 2, got %d x %d" % (self.n1, self.n2))
        if values.shape != (self.n1, self.n2):
            raise ValueError("Grid values shape %s does not match %d x %d" % (values.shape, self.n1, self.n2))
        object.__setattr__(self, "values", values)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return _axis(self.n1, self.endpoint), _axis(self.n2, self.endpoint)

    def weights(self) -> tuple[float, float]:
        """Krok h reguły prostokątów na każdej osi."""
        if self.endpoint:
            return 1.0 / (self.n1 - 1), 1.0 / (self.n2 - 1)
        return 1.0 / self.n1, 1.0 / self.n2

    def periodic_values(self) -> np.ndarray:
        """Próbki bez powtórzonego wiersza i kolumny θ = 1."""
        return self.values[:-1, :-1] if self.endpoint else self.values


class GridField:
    """Pole z próbek siatki: dokładne w węzłach, biliniowe (okresowo) między nimi."""

    def __init__(self, samples: GridSamples) -> None:
        self.samples = samples
        self._values = samples.periodic_values()

    def evaluate(self, p: AnyPoint) -> float:
        if not isinstance(p, TorusPoint):
            p = p.to_float()
        return float(self.evaluate_array(np.array(p.theta1), np.array(p.theta2)))

    def evaluate_array(self, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
        n1, n2 = self._values.shape
        x = (np.asarray(theta1, dtype=float) % 1.0) * n1
        y = (np.asarray(theta2, dtype=float) % 1.0) * n2
        i0 = np.floor(x).astype(int)
        j0 = np.floor(y).astype(int)
        fx = x - i0
        fy = y - j0
        i0 %= n1
        j0 %= n2
        i1 = (i0 + 1) % n1
        j1 = (j0 + 1) % n2
        v = self._values
        return (
            (1 - fx) * (1 - fy) * v[i0, j0]
            + fx * (1 - fy) * v[i1, j0]
            + (1 - fx) * fy * v[i0, j1]
            + fx * fy * v[i1, j1]
        )


def sample_grid(
    field: CostField,
    n1: int,
    n2: int | None = None,
    *,
    workers: int | None = None,
    endpoint: bool = False,
) -> GridSamples:
    """Próbkuje pole na siatce n1×n2; bloki wierszy liczone równolegle. endpoint=True dokłada węzeł θ = 1."""
    n2 = n2 or n1
    if n1 < 2 or n2 < 2:
        raise ValueError("Grid needs n1, n2 >= 2, got %d x %d" % (n1, n2))
    workers = max(1, workers or config.WORKERS)
    t1 = _axis(n1, endpoint)
    t2 = _axis(n2, endpoint)
    blocks = [b for b in np.array_split(np.arange(n1), min(workers, n1)) if b.size]

    def _block(rows: np.ndarray) -> np.ndarray:
        T1, T2 = np.meshgrid(t1[rows], t2, indexing="ij")
        return np.asarray(field.evaluate_array(T1, T2), dtype=float)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        values = np.vstack(list(pool.map(_block, blocks)))
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        i, j = bad[0]
        raise NonFiniteFieldError("Non-finite field sample", (t1[i], t2[j]))
    logger.info("Sampled field on %d x %d grid (endpoint=%s)", n1, n2, endpoint)
    return GridSamples(n1, n2, values, endpoint)


def save_grid(samples: GridSamples, path: Path | str) -> Path:
    """CSV (wiersz siatki na linię) + plik .json z wymiarami obok."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, samples.values, delimiter=",", fmt="%.17g")
    with open(path.with_suffix(".json"), "w", encoding="utf-8") as f:
        json.dump({"n1": samples.n1, "n2": samples.n2, "endpoint": samples.endpoint}, f, ensure_ascii=False, indent=2)
    return path


def load_grid(path: Path | str) -> GridSamples:
    path = Path(path)
    sidecar = path.with_suffix(".json")
    if not path.exists():
        raise FileNotFoundError(str(path))
    if not sidecar.exists():
        raise FileNotFoundError(str(sidecar))
    with open(sidecar, encoding="utf-8") as f:
        dims = json.load(f)
    values = np.loadtxt(path, delimiter=",", ndmin=2)
    return GridSamples(int(dims["n1"]), int(dims["n2"]), values, bool(dims.get("endpoint", False)))


def _delta(mode: TrigMode) -> float:
    zeros = (mode.m1 == 0) + (mode.m2 == 0)
    return (4.0, 2.0, 1.0)[zeros]


def coefficient_from_samples(samples: GridSamples, mode: TrigMode) -> float:
    if mode.is_zero:
        return 0.0
    t1, t2 = samples.axes()
    T1, T2 = np.meshgrid(t1, t2, indexing="ij")
    basis = mode_eval_array(mode, T1, T2)
    h1, h2 = samples.weights()
    return _delta(mode) * h1 * h2 * float(np.sum(samples.values * basis))


def coefficient_quadrature(field: CostField, mode: TrigMode, nodes_per_axis: int) -> float:
    """δ·(reguła prostokątów dla ∫∫ F·Λ); na funkcjach okresowych zbieżność spektralna."""
    guard = 2 * mode.max_frequency + 2
    if nodes_per_axis < guard:
        raise AliasingError(
            "nodes_per_axis=%d below Nyquist guard %d for mode %s" % (nodes_per_axis, guard, mode.label())
        )
    samples = sample_grid(field, nodes_per_axis)
    return coefficient_from_samples(samples, mode)


@dataclass(frozen=True)
class ModeEntry:
    mode: TrigMode
    coeff: float
    ratio: float


def _sort_key(item: tuple[TrigMode, float]) -> tuple:
    mode, coeff = item
    return (-round(abs(coeff) / TIE_QUANTUM), mode.m1 + mode.m2, mode.m1, int(mode.alpha), int(mode.beta))


@dataclass(frozen=True)
class ModeTable:
    """Mody malejąco po |a|; ratio_i = a_i / a_0. Niezmienna, więc porządek zawsze obowiązuje."""

    entries: tuple[ModeEntry, ...] = ()

    @classmethod
    def from_coefficients(cls, items: Sequence[tuple[TrigMode, float]]) -> ModeTable:
        ordered = sorted(((m, float(c)) for m, c in items if not m.is_zero), key=_sort_key)
        if not ordered:
            return cls(())
        lead = ordered[0][1]
        return cls(tuple(ModeEntry(m, c, c / lead if lead else 0.0) for m, c in ordered))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ModeEntry]:
        return iter(self.entries)

    def __getitem__(self, index: int) -> ModeEntry:
        return self.entries[index]

    def coefficient(self, mode: TrigMode) -> float:
        for e in self.entries:
            if e.mode == mode:
                return e.coeff
        return 0.0

    def two_dimensional(self) -> ModeTable:
        return ModeTable.from_coefficients([(e.mode, e.coeff) for e in self.entries if e.mode.is_two_dimensional])

    def top(self, n: int) -> ModeTable:
        return ModeTable(self.entries[:n])

    def to_rows(self) -> list[dict[str, float | int]]:
        return [{**e.mode.to_dict(), "coeff": e.coeff, "ratio": e.ratio} for e in self.entries]

    def to_csv(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for e in self.entries:
                m = e.mode
                writer.writerow([m.m1, m.m2, int(m.alpha), int(m.beta), "%.10e" % e.coeff, "%.6f" % e.ratio])
        return path

    @classmethod
    def from_csv(cls, path: Path | str) -> ModeTable:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        items = [
            (TrigMode(int(r["m1"]), int(r["m2"]), Parity(int(r["alpha"])), Parity(int(r["beta"]))), float(r["coeff"]))
            for r in rows
        ]
        return cls.from_coefficients(items)


def spectrum_fft(samples: GridSamples, max_freq: int) -> ModeTable:
    """
    2-D DFT siatki → współczynniki sin/cos dla 0 ≤ m1, m2 ≤ max_freq.

    Z C(p,q) = X[p mod n1, q mod n2]/(n1·n2), S = C(m1,m2)+C(m1,−m2), D = C(m1,m2)−C(m1,−m2):
    a¹¹ = 2Re S, a⁰¹ = −2Im S, a⁰⁰ = −2Re D, a¹⁰ = −2Im D. Na osiach: a¹¹ = 2Re C, sinus = −2Im C.
    """
    values = samples.periodic_values()
    n1, n2 = values.shape
    if n1 <= 2 * max_freq or n2 <= 2 * max_freq:
        raise AliasingError("Grid %d x %d too small for max_freq=%d (need > %d)" % (n1, n2, max_freq, 2 * max_freq))
    X = np.fft.fft2(values) / (n1 * n2)

    def C(p: int, q: int) -> complex:
        return complex(X[p % n1, q % n2])

    cos, sin = Parity.COS, Parity.SIN
    items: list[tuple[TrigMode, float]] = [(TrigMode(0, 0, cos, cos), C(0, 0).real)]
    for m in range(1, max_freq + 1):
        c = C(m, 0)
        items.append((TrigMode(m, 0, cos, cos), 2.0 * c.real))
        items.append((TrigMode(m, 0, sin, cos), -2.0 * c.imag))
        c = C(0, m)
        items.append((TrigMode(0, m, cos, cos), 2.0 * c.real))
        items.append((TrigMode(0, m, cos, sin), -2.0 * c.imag))
    for m1 in range(1, max_freq + 1):
        for m2 in range(1, max_freq + 1):
            s = C(m1, m2) + C(m1, -m2)
            d = C(m1, m2) - C(m1, -m2)
            items.append((TrigMode(m1, m2, cos, cos), 2.0 * s.real))
            items.append((TrigMode(m1, m2, sin, cos), -2.0 * s.imag))
            items.append((TrigMode(m1, m2, sin, sin), -2.0 * d.real))
            items.append((TrigMode(m1, m2, cos, sin), -2.0 * d.imag))

    table = _above_floor(items)
    logger.info("FFT spectrum: %d modes above floor (grid %d x %d, max_freq %d)", len(table), n1, n2, max_freq)
    return table


def _above_floor(items: list[tuple[TrigMode, float]]) -> ModeTable:
    scale = max(abs(c) for _, c in items)
    return ModeTable.from_coefficients([(m, c) for m, c in items if abs(c) > FFT_DROP_RTOL * scale])


def spectrum_rectangular(samples: GridSamples, max_freq: int) -> ModeTable:
    """
    Współczynniki δ·h1·h2·Σ F·Λ po wszystkich węzłach siatki, dla 0 ≤ m1, m2 ≤ max_freq.

    Na siatce domkniętej węzły θ = 0 i θ = 1 liczą się oba, więc wynik różni się od FFT o O(h).
    """
    n1, n2 = samples.periodic_values().shape
    if n1 <= 2 * max_freq or n2 <= 2 * max_freq:
        raise AliasingError("Grid %d x %d too small for max_freq=%d (need > %d)" % (n1, n2, max_freq, 2 * max_freq))
    t1, t2 = samples.axes()
    h1, h2 = samples.weights()
    k = np.arange(max_freq + 1)[:, None]
    # basis[axis][parity]: wiersz = częstotliwość, kolumna = węzeł
    basis = [
        {Parity.SIN: np.sin(2 * np.pi * k * t), Parity.COS: np.cos(2 * np.pi * k * t)}
        for t in (t1, t2)
    ]
    items: list[tuple[TrigMode, float]] = []
    for alpha in Parity:
        for beta in Parity:
            sums = basis[0][alpha] @ samples.values @ basis[1][beta].T * (h1 * h2)
            for m1 in range(max_freq + 1):
                for m2 in range(max_freq + 1):
                    mode = TrigMode(m1, m2, alpha, beta)
                    if not mode.is_zero:
                        items.append((mode, _delta(mode) * float(sums[m1, m2])))
    table = _above_floor(items)
    logger.info(
        "Rectangular-rule spectrum: %d modes above floor (closed=%s, grid %d x %d, max_freq %d)",
        len(table),
        samples.endpoint,
        samples.n1,
        samples.n2,
        max_freq,
    )
    return table


def default_grid(quadrature: Quadrature | str) -> int:
    return config.RECT_NODES if Quadrature(quadrature) == Quadrature.RECTANGULAR else config.GRID_SIZE


def field_spectrum(
    field: CostField,
    grid: int,
    max_freq: int,
    quadrature: Quadrature | str = Quadrature.FFT,
    *,
    workers: int | None = None,
) -> tuple[GridSamples, ModeTable]:
    """Próbkowanie + tabela modów wybraną regułą; siatkę sprawdzamy przed kosztownym próbkowaniem."""
    quadrature = Quadrature(quadrature)
    closed = quadrature == Quadrature.RECTANGULAR
    # siatka domknięta ma grid − 1 różnych węzłów na oś
    effective = grid - 1 if closed else grid
    if effective <= 2 * max_freq:
        raise AliasingError("Grid %d too small for max_freq=%d with %s quadrature" % (grid, max_freq, quadrature.value))
    samples = sample_grid(field, grid, workers=workers, endpoint=closed)
    if closed:
        return samples, spectrum_rectangular(samples, max_freq)
    return samples, spectrum_fft(samples, max_freq)


def truncate_spectrum(table: ModeTable, s: int, *, min_ratio: float | None = None) -> TrigPolynomial:
    """Θ_s = Λ_0 + Σ_{i=1..s} b_i Λ_i po modach dwuwymiarowych z |b_i| ≥ min_ratio."""
    if s < 0:
        raise ValueError("Truncation level must be non-negative, got %d" % s)
    min_ratio = config.MIN_RATIO if min_ratio is None else min_ratio
    modes = [e for e in table.two_dimensional() if abs(e.ratio) >= min_ratio]
    if len(modes) < s + 1:
        raise NotEnoughModesError("Need %d two-dimensional modes, table has %d" % (s + 1, len(modes)))
    terms = [(1.0, modes[0].mode)] + [(e.ratio, e.mode) for e in modes[1 : s + 1]]
    return TrigPolynomial(tuple(terms))


def tied_blocks(table: ModeTable, tie_tol: float | None = None) -> list[tuple[int, int]]:
    """Zakresy [start, end) kolejnych modów 2D, których |a| różnią się o mniej niż tie_tol·|a_0|."""
    tie_tol = config.TIE_TOL if tie_tol is None else tie_tol
    modes = table.two_dimensional()
    if len(modes) < 2:
        return []
    threshold = tie_tol * abs(modes[0].coeff)
    blocks: list[tuple[int, int]] = []
    start = 0
    for i in range(1, len(modes) + 1):
        if i < len(modes) and abs(abs(modes[i - 1].coeff) - abs(modes[i].coeff)) < threshold:
            continue
        if i - start > 1:
            blocks.append((start, i))
        start = i
    return blocks


def split_superposition(poly: TrigPolynomial) -> tuple[TrigPolynomial, TrigPolynomial, TrigPolynomial]:
    delta1: list[tuple[float, TrigMode]] = []
    delta2: list[tuple[float, TrigMode]] = []
    theta: list[tuple[float, TrigMode]] = []
    for c, m in poly.terms:
        if m.is_constant:
            # a00/2 trafia do obu nawiasów
            delta1.append((c / 2.0, m))
            delta2.append((c / 2.0, m))
        elif m.m2 == 0:
            delta1.append((c, m))
        elif m.m1 == 0:
            delta2.append((c, m))
        else:
            theta.append((c, m))
    return TrigPolynomial(tuple(delta1)), TrigPolynomial(tuple(delta2)), TrigPolynomial(tuple(theta))
