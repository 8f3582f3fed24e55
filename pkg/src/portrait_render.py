"""
Zapis portretu fazowego: SVG (matplotlib, deterministyczny tekst), opcjonalny podgląd PNG
(matplotlib + pomniejszenie Pillow) i CSV trajektorii.
Kwadrat jednostkowy [0,1)², θ1 w prawo, θ2 w górę; przejścia przez brzeg torusa przerywają linię.
"""
from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence

import matplotlib
import numpy as np
from matplotlib.axes import Axes
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from PIL import Image

import config
from src.dynamics import Classification, CriticalPointReport
from src.flow_sim import Portrait, Trajectory
from src.trig_poly import RationalTorusPoint

logger = logging.getLogger(__name__)

# odstęp (w jednostkach torusa) między zapisanymi punktami linii i między grotami strzałek
MIN_SPACING = 1e-3
ARROW_SPACING = 0.15
ARROW_LENGTH = 0.02
# limit punktów linii na trajektorię (orbity zamknięte wracają po tej samej pętli)
MAX_POINTS = 5000

DPI = 100
# pole znacznika punktu krytycznego w pt²
MARKER_AREA = 40
SVG_HASH_SALT = "torus-minmax"

COLORS = {
    Classification.SADDLE: "#1f5fbf",
    Classification.CENTER: "#808080",
    Classification.SPIRAL_ATTRACTOR: "#1a9641",
    Classification.SPIRAL_REPULSOR: "#d7191c",
    Classification.ATTRACTING_NODE: "#006d2c",
    Classification.REPELLING_NODE: "#a50f15",
    Classification.DEGENERATE: "#000000",
}
LINE_COLOR = "#4d4d4d"

CSV_HEADER = ["seed_id", "t", "theta1", "theta2"]


def _segments(thetas: np.ndarray) -> list[np.ndarray]:
    """Dzieli trajektorię w miejscach zawinięcia mod 1 i przerzedza punkty."""
    if len(thetas) == 0:
        return []
    jumps = np.flatnonzero(np.any(np.abs(np.diff(thetas, axis=0)) > 0.5, axis=1)) + 1
    out: list[np.ndarray] = []
    budget = MAX_POINTS
    for part in np.split(thetas, jumps):
        if budget <= 0:
            break
        kept = [part[0]]
        acc = 0.0
        for prev, cur in zip(part[:-1], part[1:]):
            if len(kept) >= budget:
                break
            acc += float(np.hypot(*(cur - prev)))
            if acc >= MIN_SPACING:
                kept.append(cur)
                acc = 0.0
        else:
            if len(part) > 1 and not np.array_equal(kept[-1], part[-1]):
                kept.append(part[-1])
        budget -= len(kept)
        out.append(np.array(kept))
    return out


def _arrows(segment: np.ndarray, offset: float) -> tuple[list[tuple[np.ndarray, np.ndarray]], float]:
    """(punkt, kierunek jednostkowy) co ARROW_SPACING długości łuku; zwraca też przeniesiony licznik."""
    arrows: list[tuple[np.ndarray, np.ndarray]] = []
    acc = offset
    for prev, cur in zip(segment[:-1], segment[1:]):
        step = cur - prev
        length = float(np.hypot(*step))
        if length == 0.0:
            continue
        acc += length
        if acc >= ARROW_SPACING:
            arrows.append((cur, step / length))
            acc = 0.0
    return arrows, acc


def _location(report: CriticalPointReport) -> tuple[float, float]:
    loc = report.location
    if isinstance(loc, RationalTorusPoint):
        loc = loc.to_float()
    return loc.theta1, loc.theta2


def _draw_trajectory(ax: Axes, index: int, traj: Trajectory) -> None:
    segments = _segments(traj.thetas)
    lines = [s for s in segments if len(s) > 1]
    dots = [s[0] for s in segments if len(s) == 1]
    if lines:
        # NaN między odcinkami przerywa linię na brzegu torusa
        joined = np.vstack([np.vstack((s, [[np.nan, np.nan]])) for s in lines])[:-1]
        ax.plot(joined[:, 0], joined[:, 1], color=LINE_COLOR, linewidth=0.8, gid="trajectory-%d" % index)
        arrows: list[tuple[np.ndarray, np.ndarray]] = []
        carry = 0.0
        for seg in lines:
            found, carry = _arrows(seg, carry)
            arrows.extend(found)
        if arrows:
            at = np.array([p for p, _ in arrows])
            heading = np.array([d for _, d in arrows])
            ax.quiver(
                at[:, 0],
                at[:, 1],
                heading[:, 0],
                heading[:, 1],
                color=LINE_COLOR,
                angles="xy",
                scale_units="xy",
                scale=1.0 / ARROW_LENGTH,
                pivot="tip",
                width=0.004,
                headwidth=4,
                headlength=5,
                headaxislength=4.5,
                gid="arrows-%d" % index,
            )
    if dots:
        d = np.array(dots)
        ax.plot(d[:, 0], d[:, 1], linestyle="none", marker="o", markersize=2, color=LINE_COLOR, gid="dot-%d" % index)


def _figure(portrait: Portrait, critical_points: Iterable[CriticalPointReport], pixels: int, dpi: int) -> Figure:
    """Kwadrat [0,1)² na całym płótnie pixels×pixels."""
    fig = Figure(figsize=(pixels / dpi, pixels / dpi), dpi=dpi, facecolor="white")
    FigureCanvasAgg(fig)
    ax = fig.add_axes((0.0, 0.0, 1.0, 1.0))
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    for i, traj in enumerate(portrait.trajectories):
        _draw_trajectory(ax, i, traj)
    for j, report in enumerate(critical_points):
        x, y = _location(report)
        ax.scatter(
            [x],
            [y],
            s=MARKER_AREA,
            c=COLORS[report.classification],
            edgecolors="black",
            linewidths=0.5,
            zorder=3,
            clip_on=False,
            gid="%s-%d" % (report.classification.value, j),
        )
    return fig


def render_svg(
    portrait: Portrait,
    critical_points: Iterable[CriticalPointReport] = (),
    size: Optional[int] = None,
) -> str:
    """SVG bez daty, ze stałą solą identyfikatorów."""
    size = size or config.SVG_SIZE_PX
    fig = _figure(portrait, critical_points, size, DPI)
    buf = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig.savefig(
            buf,
            format="svg",
            metadata={"Date": None, "Title": "%s (%s flow)" % (portrait.field_descriptor, portrait.flow.value)},
        )
    return buf.getvalue().decode("utf-8")


def write_svg(
    portrait: Portrait,
    path: Path | str,
    critical_points: Iterable[CriticalPointReport] = (),
    size: Optional[int] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(portrait, critical_points, size), encoding="utf-8")
    logger.info("Saved to %s", path)
    return path


def write_png(
    portrait: Portrait,
    path: Path | str,
    critical_points: Iterable[CriticalPointReport] = (),
    size: Optional[int] = None,
    supersample: Optional[int] = None,
) -> Path:
    """
    Podgląd rastrowy: rysunek w rozdzielczości supersample× większej, potem pomniejszenie LANCZOS.
    """
    size = size or config.PNG_SIZE_PX
    ss = supersample or config.PNG_SUPERSAMPLE
    fig = _figure(portrait, critical_points, size * ss, DPI * ss)
    buf = io.BytesIO()
    fig.savefig(buf, format="png")
    buf.seek(0)
    with Image.open(buf) as big:
        img = big.convert("RGB").resize((size, size), Image.Resampling.LANCZOS)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path, format="PNG", optimize=True)
    logger.info("Saved to %s", path)
    return path


def write_trajectories_csv(trajectories: Sequence[Trajectory], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = "%%.%df" % config.FLOAT_DIGITS
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for seed_id, traj in enumerate(trajectories):
            for t, (a, b) in zip(traj.times, traj.thetas):
                w.writerow([seed_id, fmt % t, fmt % a, fmt % b])
    logger.info("Saved to %s", path)
    return path

