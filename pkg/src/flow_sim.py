"""
Całkowanie przepływów na torusie: gradientowego (Morse, θ' = ∇F) i Nasha (θ' = (∂1F, −∂2F)).
RK4 ze stałym krokiem, wszystkie punkty startowe naraz na tablicach numpy, zawijanie mod 1 po każdym kroku.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

import config
from src.dynamics import Field, field_hessian, nash_matrix
from src.errors import NonFiniteFieldError, SingularPointError
from src.trig_poly import AnyPoint, RationalTorusPoint, TorusPoint, TrigMode, TrigPolynomial, torus_delta, torus_distance

logger = logging.getLogger(__name__)

Velocity = Callable[[np.ndarray], np.ndarray]

# |cos| lub |sin| poniżej progu → niezmiennik nieokreślony
INVARIANT_SINGULAR = 1e-12


class FlowKind(str, Enum):
    MORSE = "morse"
    NASH = "nash"


@dataclass
class Trajectory:
    times: np.ndarray
    thetas: np.ndarray
    dt: float
    seed: TorusPoint
    method: str = "rk4"
    error: str | None = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def points(self) -> list[tuple[float, TorusPoint]]:
        return [(float(t), TorusPoint(float(a), float(b))) for t, (a, b) in zip(self.times, self.thetas)]

    @property
    def end(self) -> TorusPoint:
        a, b = self.thetas[-1]
        return TorusPoint(float(a), float(b))


@dataclass
class Portrait:
    trajectories: list[Trajectory]
    seeds: list[TorusPoint]
    field_descriptor: str
    flow: FlowKind = FlowKind.NASH
    failures: list[dict[str, str]] = field(default_factory=list)


def _as_float(p: AnyPoint) -> TorusPoint:
    return p.to_float() if isinstance(p, RationalTorusPoint) else p


def _signed(g1: np.ndarray, g2: np.ndarray, flow: FlowKind) -> np.ndarray:
    if flow == FlowKind.NASH:
        g2 = -g2
    return np.stack([g1, g2], axis=-1)


def _fd_gradient(f: Field, x: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    a, b = x[:, 0], x[:, 1]
    t1 = np.concatenate([a + h, a - h, a, a])
    t2 = np.concatenate([b, b, b + h, b - h])
    v = np.asarray(f.evaluate_array(t1, t2), dtype=float).reshape(4, -1)
    return (v[0] - v[1]) / (2 * h), (v[2] - v[3]) / (2 * h)


def velocity_field(f: Field, flow: FlowKind | str, h: float | None = None) -> Velocity:
    """X ↦ pole wektorowe przepływu w punktach X kształtu (n, 2)."""
    flow = FlowKind(flow)
    h = h or config.FD_STEP

    if isinstance(f, TrigPolynomial):
        def _poly(x: np.ndarray) -> np.ndarray:
            g1, g2 = f.gradient_array(x[:, 0], x[:, 1])
            return _signed(np.asarray(g1, dtype=float), np.asarray(g2, dtype=float), flow)

        return _poly

    def _black_box(x: np.ndarray) -> np.ndarray:
        try:
            g1, g2 = _fd_gradient(f, x, h)
        except NonFiniteFieldError:
            # pojedynczo, żeby zamrozić tylko winne punkty
            g1 = np.full(len(x), np.nan)
            g2 = np.full(len(x), np.nan)
            for i in range(len(x)):
                try:
                    a, b = _fd_gradient(f, x[i : i + 1], h)
                    g1[i], g2[i] = a[0], b[0]
                except NonFiniteFieldError as e:
                    logger.debug("Non-finite field near %s: %s", x[i].tolist(), e)
        return _signed(g1, g2, flow)

    return _black_box


def _rk4_step(v: Velocity, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = v(x)
    k2 = v(x + 0.5 * dt * k1)
    k3 = v(x + 0.5 * dt * k2)
    k4 = v(x + dt * k3)
    return x + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def _check_step(dt: float, steps: int) -> None:
    if not dt > 0:
        raise ValueError("dt must be positive, got %r" % dt)
    if steps < 0:
        raise ValueError("steps must be non-negative, got %r" % steps)


def integrate_many(
    f: Field,
    flow: FlowKind | str,
    seeds: Sequence[AnyPoint],
    dt: float,
    steps: int,
) -> list[Trajectory]:
    """
    RK4 dla wszystkich punktów startowych naraz. Punkt, w którym pole przestaje być skończone,
    zostaje zamrożony: jego trajektoria kończy się na ostatnim poprawnym kroku, a error opisuje miejsce.
    """
    _check_step(dt, steps)
    starts = [_as_float(s) for s in seeds]
    if not starts:
        return []
    h = min(dt / 10.0, config.FD_STEP)
    v = velocity_field(f, flow, h)
    x = np.array([[s.theta1, s.theta2] for s in starts], dtype=float)
    n = len(x)
    out = np.empty((steps + 1, n, 2))
    out[0] = x
    alive = np.ones(n, dtype=bool)
    last = np.full(n, steps, dtype=int)
    errors: list[str | None] = [None] * n

    for i in range(steps):
        nxt = _rk4_step(v, x, dt)
        bad = alive & ~np.isfinite(nxt).all(axis=1)
        for j in np.flatnonzero(bad):
            errors[j] = "non-finite field value near (%.6f, %.6f) at t=%.6g" % (x[j, 0], x[j, 1], i * dt)
            last[j] = i
            logger.warning("Seed %d frozen: %s", j, errors[j])
        alive &= ~bad
        nxt[~alive] = x[~alive]
        x = np.mod(nxt, 1.0)
        out[i + 1] = x

    times = dt * np.arange(steps + 1)
    return [
        Trajectory(
            times=times[: last[j] + 1].copy(),
            thetas=out[: last[j] + 1, j, :].copy(),
            dt=dt,
            seed=starts[j],
            error=errors[j],
        )
        for j in range(n)
    ]


def integrate(f: Field, flow: FlowKind | str, seed: AnyPoint, dt: float, steps: int) -> Trajectory:
    traj = integrate_many(f, flow, [seed], dt, steps)[0]
    if traj.error is not None:
        end = traj.end
        raise NonFiniteFieldError(traj.error, (end.theta1, end.theta2))
    return traj


def default_dt(f: Field) -> float:
    """1e-3 / (maks. częstotliwość) dla wielomianów, config.DT dla pól czarnej skrzynki."""
    if isinstance(f, TrigPolynomial):
        return config.DT / max(1, f.max_frequency())
    return config.DT


def default_steps(dt: float) -> int:
    return int(math.ceil(config.FLOW_T_END / dt))


def seed_lattice(seed_grid: int) -> list[TorusPoint]:
    if seed_grid < 2:
        raise ValueError("seed_grid must be >= 2, got %r" % seed_grid)
    return [
        TorusPoint((i + 0.5) / seed_grid, (j + 0.5) / seed_grid)
        for i in range(seed_grid)
        for j in range(seed_grid)
    ]


def portrait(
    f: Field,
    flow: FlowKind | str,
    seed_grid: int,
    dt: float,
    steps: int,
    *,
    descriptor: str | None = None,
) -> Portrait:
    seeds = seed_lattice(seed_grid)
    flow = FlowKind(flow)
    trajectories = integrate_many(f, flow, seeds, dt, steps)
    failures = [
        {"seed": "%.6f,%.6f" % (t.seed.theta1, t.seed.theta2), "error": t.error}
        for t in trajectories
        if t.error is not None
    ]
    logger.info("Portrait: %d seeds, %d steps, %d failures", len(seeds), steps, len(failures))
    return Portrait(
        trajectories=trajectories,
        seeds=seeds,
        field_descriptor=descriptor or repr(f),
        flow=flow,
        failures=failures,
    )


def _separable_term(m: int, parity: int, theta: float) -> float:
    x = math.tau * m * theta
    c = math.cos(x) if int(parity) == 0 else math.sin(x)
    if abs(c) < INVARIANT_SINGULAR:
        raise SingularPointError("Invariant undefined: trig factor vanishes at theta=%r (m=%d)" % (theta, m))
    return -math.log(abs(c)) / (m * m)


def separable_invariant(mode: TrigMode, p: AnyPoint) -> float:
    """
    Pierwsza całka przepływu Nasha modu Λ = f(θ1)·g(θ2): P(θ1) + Q(θ2),
    z P' ∝ f/f', Q' ∝ g/g' (ta sama stała 4π² dla obu osi).
    """
    if not mode.is_two_dimensional:
        raise ValueError("separable_invariant needs m1, m2 >= 1, got %s" % mode.label())
    q = _as_float(p)
    return _separable_term(mode.m1, mode.alpha, q.theta1) + _separable_term(mode.m2, mode.beta, q.theta2)


def flow_distance(
    field_a: Field,
    field_b: Field,
    flow: FlowKind | str,
    seeds: Sequence[AnyPoint],
    dt: float,
    steps: int,
) -> list[tuple[float, float]]:
    """(t, max po punktach startowych odległości torusowej) dla dwóch pól z tych samych startów."""
    ta = integrate_many(field_a, flow, seeds, dt, steps)
    tb = integrate_many(field_b, flow, seeds, dt, steps)
    k = min(min(len(t) for t in ta), min(len(t) for t in tb))
    dist = np.zeros(k)
    for a, b in zip(ta, tb):
        d = torus_delta(a.thetas[:k], b.thetas[:k])
        dist = np.maximum(dist, np.hypot(d[:, 0], d[:, 1]))
    times = ta[0].times[:k]
    return [(float(t), float(d)) for t, d in zip(times, dist)]


def gronwall_bound(
    field_a: Field,
    field_b: Field,
    flow: FlowKind | str,
    t: float,
    grid: int = 64,
) -> float:
    """
    (e^{Mt} − 1)/M · sup|X − Y|, M = maks. norma operatorowa jakobianu pola X na siatce grid×grid.
    Oszacowanie odległości trajektorii z tego samego startu po czasie t.
    """
    flow = FlowKind(flow)
    if t < 0:
        raise ValueError("t must be non-negative, got %r" % t)
    axis = np.arange(grid) / grid
    t1, t2 = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([t1.ravel(), t2.ravel()], axis=-1)
    va = velocity_field(field_a, flow)(pts)
    vb = velocity_field(field_b, flow)(pts)
    sup_diff = float(np.max(np.hypot(*(va - vb).T)))

    lip = 0.0
    for a, b in pts:
        hess = field_hessian(field_a, TorusPoint(float(a), float(b)))
        jac = nash_matrix(hess) if flow == FlowKind.NASH else hess
        lip = max(lip, float(np.linalg.norm(jac, 2)))
    logger.debug("Gronwall: M=%.6g, sup|X-Y|=%.6g on %d x %d grid", lip, sup_diff, grid, grid)
    if lip == 0.0:
        return t * sup_diff
    return math.expm1(lip * t) / lip * sup_diff


def poincare_return(trajectory: Trajectory) -> tuple[float, float] | None:
    """
    Pierwszy powrót do odcinka przez punkt startowy, prostopadłego do prędkości początkowej
    (przejście w tym samym kierunku), z interpolacją liniową. None gdy brak powrotu.
    """
    th = trajectory.thetas
    if len(th) < 3:
        return None
    d = torus_delta(th[0], th)
    v0 = d[1]
    if not np.any(v0):
        return None
    s = d @ v0
    for k in range(2, len(s)):
        if s[k - 1] < 0.0 <= s[k]:
            lam = -s[k - 1] / (s[k] - s[k - 1])
            point = d[k - 1] + lam * (d[k] - d[k - 1])
            t_ret = float(trajectory.times[k - 1] + lam * trajectory.dt)
            return t_ret, float(np.hypot(point[0], point[1]))
    return None


def nearest_point(p: AnyPoint, candidates: Sequence[AnyPoint]) -> int:
    """Indeks najbliższego (w metryce torusa) kandydata."""
    if not candidates:
        raise ValueError("No candidate points")
    dists = [torus_distance(p, c) for c in candidates]
    return int(np.argmin(dists))

