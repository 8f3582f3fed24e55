"""
Toy GAN na torusie: dane z rozkładu wykładniczego Exp(χ(ω)), generator to kwantyl
Exp(χ(θ2)), dyskryminator to optymalny iloraz gęstości dla parametru χ(θ1).
Funkcja kosztu F(θ1, θ2) = E_data log D + E_gen log(1 − D), całki Simpsonem na [0, x_cutoff].

Łącznik χ(θ) = sin²(πθ) + 1, więc χ(1/4) = 3/2 i F jest 1-okresowa w obu argumentach.
"""
from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.special import expit

import config
from src.errors import GeneratorDomainError, NonFiniteFieldError
from src.trig_poly import AnyPoint, TorusPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpFamily:
    """Rozkład wykładniczy o intensywności xi (średnia 1/xi)."""

    xi: float

    def __post_init__(self) -> None:
        if not self.xi > 0:
            raise ValueError("Exponential rate must be positive, got %r" % self.xi)

    def pdf(self, x: np.ndarray | float) -> np.ndarray | float:
        return self.xi * np.exp(-self.xi * np.asarray(x, dtype=float))

    def cdf(self, x: np.ndarray | float) -> np.ndarray | float:
        return -np.expm1(-self.xi * np.asarray(x, dtype=float))

    def quantile(self, lam: float) -> float:
        if not 0.0 <= lam < 1.0:
            raise GeneratorDomainError("Quantile level must be in [0, 1), got %r" % lam)
        return -math.log1p(-lam) / self.xi


@dataclass(frozen=True)
class GanConfig:
    omega: float = field(default_factory=lambda: config.GAN_OMEGA)
    x_cutoff: float = field(default_factory=lambda: config.GAN_X_CUTOFF)
    simpson_nodes: int = field(default_factory=lambda: config.GAN_SIMPSON_NODES)

    def __post_init__(self) -> None:
        if not 0.0 <= self.omega < 1.0:
            raise ValueError("omega must be in [0, 1), got %r" % self.omega)
        if not self.x_cutoff > 0:
            raise ValueError("x_cutoff must be positive, got %r" % self.x_cutoff)
        if self.simpson_nodes < 3 or self.simpson_nodes % 2 == 0:
            raise ValueError("simpson_nodes must be odd and >= 3, got %r" % self.simpson_nodes)

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.x_cutoff, self.simpson_nodes)

    def to_dict(self) -> dict[str, float | int]:
        return {"omega": self.omega, "x_cutoff": self.x_cutoff, "simpson_nodes": self.simpson_nodes}


def chi(theta: np.ndarray | float) -> np.ndarray | float:
    return np.sin(np.pi * np.asarray(theta, dtype=float)) ** 2 + 1.0


def _logit(theta1: np.ndarray | float, x: np.ndarray | float, cfg: GanConfig) -> np.ndarray:
    # D = f_a / (f_a + f_b) = expit(s), s = (b − a)x − ln(b/a)
    a = chi(cfg.omega)
    b = chi(theta1)
    return (b - a) * np.asarray(x, dtype=float) - np.log(b / a)


def discriminator(theta1: float, x: float, cfg: GanConfig | None = None) -> float:
    cfg = cfg or GanConfig()
    if x < 0:
        raise ValueError("Discriminator input must be non-negative, got %r" % x)
    return float(expit(_logit(theta1, x, cfg)))


def generator(theta2: float, lam: float, cfg: GanConfig | None = None) -> float:
    return ExpFamily(float(chi(theta2))).quantile(lam)


def _cost_terms_array(theta1: np.ndarray, theta2: np.ndarray, cfg: GanConfig) -> tuple[np.ndarray, np.ndarray]:
    x = cfg.nodes()
    t1 = np.asarray(theta1, dtype=float)[..., None]
    t2 = np.asarray(theta2, dtype=float)[..., None]
    s = _logit(t1, x, cfg)
    log_d = -np.logaddexp(0.0, -s)
    log_not_d = -np.logaddexp(0.0, s)
    data = ExpFamily(float(chi(cfg.omega)))
    c = chi(t2)
    real = simpson(log_d * data.pdf(x), x=x, axis=-1)
    # podstawienie λ = F_c(x) usuwa osobliwość kwantyla przy λ → 1
    fake = simpson(log_not_d * c * np.exp(-c * x), x=x, axis=-1)
    return real, fake


def cost_terms(theta1: float, theta2: float, cfg: GanConfig | None = None) -> tuple[float, float]:
    """(E_data log D, E_gen log(1 − D)) osobno."""
    cfg = cfg or GanConfig()
    real, fake = _cost_terms_array(np.array(theta1), np.array(theta2), cfg)
    real_f, fake_f = float(real), float(fake)
    if not (math.isfinite(real_f) and math.isfinite(fake_f)):
        raise NonFiniteFieldError("Non-finite GAN cost", (theta1, theta2))
    return real_f, fake_f


def cost(theta1: float, theta2: float, cfg: GanConfig | None = None) -> float:
    real, fake = cost_terms(theta1, theta2, cfg)
    return real + fake


def cost_array(theta1: np.ndarray, theta2: np.ndarray, cfg: GanConfig | None = None) -> np.ndarray:
    cfg = cfg or GanConfig()
    real, fake = _cost_terms_array(theta1, theta2, cfg)
    out = real + fake
    bad = np.argwhere(~np.isfinite(out))
    if bad.size:
        idx = tuple(bad[0])
        t1 = np.broadcast_to(theta1, out.shape)[idx]
        t2 = np.broadcast_to(theta2, out.shape)[idx]
        raise NonFiniteFieldError("Non-finite GAN cost", (float(t1), float(t2)))
    return out


def density_mass(theta: float, cfg: GanConfig | None = None) -> float:
    """∫_0^{x_cutoff} f_{χ(θ)} Simpsonem (kontrola obcięcia całki niewłaściwej)."""
    cfg = cfg or GanConfig()
    x = cfg.nodes()
    return float(simpson(ExpFamily(float(chi(theta))).pdf(x), x=x))


class GanCostField:
    """
    F jako CostField. Wartości są cache'owane po kluczu (θ1, θ2) skwantowanym
    do rozdzielczości resolution; dostęp do cache pod blokadą.
    """

    def __init__(self, cfg: GanConfig | None = None, resolution: float | None = None) -> None:
        self.cfg = cfg or GanConfig()
        self.resolution = resolution or config.GAN_CACHE_RESOLUTION
        self.max_entries = config.GAN_CACHE_MAX_ENTRIES
        self._cache: dict[tuple[int, int], float] = {}
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0

    def __repr__(self) -> str:
        return "GanCostField(omega=%g, x_cutoff=%g, simpson_nodes=%d)" % (
            self.cfg.omega,
            self.cfg.x_cutoff,
            self.cfg.simpson_nodes,
        )

    def _key(self, t1: float, t2: float) -> tuple[int, int]:
        return (round((t1 % 1.0) / self.resolution), round((t2 % 1.0) / self.resolution))

    def evaluate(self, p: AnyPoint) -> float:
        if not isinstance(p, TorusPoint):
            p = p.to_float()
        key = self._key(p.theta1, p.theta2)
        with self._lock:
            cached = self._cache.get(key)
            if cached is not None:
                self._hits += 1
                return cached
        value = cost(p.theta1, p.theta2, self.cfg)
        with self._lock:
            self._evict_if_full(1)
            self._cache[key] = value
            self._misses += 1
        return value

    def evaluate_array(self, theta1: np.ndarray, theta2: np.ndarray) -> np.ndarray:
        t1, t2 = np.broadcast_arrays(np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float))
        flat1 = t1.ravel()
        flat2 = t2.ravel()
        keys = [self._key(a, b) for a, b in zip(flat1, flat2)]
        out = np.empty(flat1.shape)
        missing: list[int] = []
        with self._lock:
            for i, key in enumerate(keys):
                cached = self._cache.get(key)
                if cached is None:
                    missing.append(i)
                else:
                    out[i] = cached
            self._hits += len(keys) - len(missing)
        if missing:
            idx = np.array(missing)
            values = cost_array(flat1[idx], flat2[idx], self.cfg)
            out[idx] = values
            with self._lock:
                self._evict_if_full(len(missing))
                for i, v in zip(missing, values):
                    self._cache[keys[i]] = float(v)
                self._misses += len(missing)
        return out.reshape(t1.shape)

    def _evict_if_full(self, incoming: int) -> None:
        # wywoływane pod blokadą; długie trajektorie generują miliony kluczy
        if len(self._cache) + incoming > self.max_entries:
            logger.debug("GAN cache full (%d entries), clearing", len(self._cache))
            self._cache.clear()

    def cache_info(self) -> dict[str, int]:
        with self._lock:
            return {"size": len(self._cache), "hits": self._hits, "misses": self._misses}


def cost_field(cfg: GanConfig | None = None) -> GanCostField:
    return GanCostField(cfg)
