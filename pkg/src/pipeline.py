"""
Główny pipeline: pole kosztu → próbkowanie siatki → widmo (FFT albo reguła prostokątów) →
obcięcia Θ_s (s = 0, 1, ...) → analiza znaków w punktach typu II modu wiodącego → stop przy pierwszym s bez centrów →
doprecyzowanie Newtonem, wartości własne, audyt Poincarégo–Hopfa → zapis do data/output/.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path
from typing import Any, Sequence

import config
from src.dynamics import (
    Classification,
    CriticalPointReport,
    Field,
    PointType,
    classify_numeric,
    lattice_indices,
    poincare_hopf_audit,
    refine_critical_point,
    type_i_point,
)
from src.errors import NotEnoughModesError, PipelineExhaustedError, TorusDynamicsError
from src.run_manifest import save_json
from src.sign_analysis import classify_truncation
from src.spectral import ModeEntry, ModeTable, Quadrature, default_grid, field_spectrum, tied_blocks
from src.trig_poly import TrigMode, TrigPolynomial

logger = logging.getLogger(__name__)


def run_pipeline(
    field: Field,
    *,
    grid: int | None = None,
    max_freq: int | None = None,
    quadrature: Quadrature | str | None = None,
    max_s: int | None = None,
    tie_tol: float | None = None,
    center_tol: float | None = None,
    workers: int | None = None,
    out_dir: Path | str | None = None,
) -> dict[str, Any]:
    """
    Pełny przebieg dla jednego pola.

    1. Próbkowanie F na siatce grid×grid (domkniętej dla reguły prostokątów)
    2. Tabela modów (FFT albo reguła prostokątów), posortowana po |a|
    3. Analiza kolejnych obcięć Θ_s (analyse_table)
    4. Zapis pipeline.json do out_dir (także przy wyczerpaniu s)
    """
    quadrature = Quadrature(quadrature or config.QUADRATURE)
    grid = grid or default_grid(quadrature)
    max_freq = max_freq or config.MAX_FREQ
    run_info = {"grid": grid, "max_freq": max_freq, "quadrature": quadrature.value}

    # 1) Siatka + 2) Widmo
    _, table = field_spectrum(field, grid, max_freq, quadrature, workers=workers)

    # 3) Obcięcia
    try:
        result = analyse_table(table, max_s=max_s, tie_tol=tie_tol, center_tol=center_tol, workers=workers)
    except PipelineExhaustedError as e:
        e.result.update(run_info)
        if out_dir is not None:
            _save_result(e.result, Path(out_dir))
        raise
    result.update(run_info)

    # 4) Zapis
    if out_dir is not None:
        _save_result(result, Path(out_dir))
    return result


def _truncation(entries: Sequence[ModeEntry], lead_sign: int) -> TrigPolynomial:
    # F/|a0| ≈ sign(a0)·Θ_s, żeby ujemny współczynnik wiodący nie odwracał czasu
    terms = [(float(lead_sign), entries[0].mode)] + [(lead_sign * e.ratio, e.mode) for e in entries[1:]]
    return TrigPolynomial(tuple(terms))


def _classify_type_ii(poly: TrigPolynomial, lead: TrigMode, workers: int) -> list[CriticalPointReport]:
    indices = lattice_indices(lead)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: classify_truncation(poly, k[0], k[1]), indices))


def _verdicts(reports: Sequence[CriticalPointReport]) -> list[str]:
    return [r.classification.value for r in reports]


def _tie_check(
    modes: Sequence[ModeEntry],
    s: int,
    block: tuple[int, int],
    canonical: list[str],
    lead_sign: int,
    workers: int,
) -> dict[str, Any]:
    """Powtarza analizę dla każdego wyboru modów z bloku remisowego przeciętego przez obcięcie."""
    start, end = block
    canonical_pick = tuple(range(start, s + 1))
    checked = 0
    disagreeing: list[list[str]] = []
    for pick in combinations(range(start, end), s - start + 1):
        if checked >= config.MAX_TIE_PERMUTATIONS:
            logger.warning("Tie block %s at s=%d: stopped after %d permutations", block, s, checked)
            break
        checked += 1
        if pick == canonical_pick:
            continue
        alt = list(modes[:start]) + [modes[i] for i in pick]
        reports = _classify_type_ii(_truncation(alt, lead_sign), modes[0].mode, workers)
        if _verdicts(reports) != canonical:
            disagreeing.append([modes[i].mode.label() for i in pick])
    agreement = not disagreeing
    logger.info("Tie block %s at s=%d: %d permutations, agreement=%s", block, s, checked, agreement)
    return {
        "block": [modes[i].mode.label() for i in range(start, end)],
        "permutations_checked": checked,
        "agreement": agreement,
        "disagreeing_choices": disagreeing,
    }


def _refine_reports(
    poly: TrigPolynomial,
    lead: TrigMode,
    sign_reports: Sequence[CriticalPointReport],
    center_tol: float,
    failures: list[dict[str, Any]],
) -> list[CriticalPointReport]:
    """
    Punkty typu II: werdykt z analizy znaków, położenie i wartości własne z Newtona.
    Punkty typu I: Newton + klasyfikacja numeryczna (oczekiwane siodła).
    """
    out: list[CriticalPointReport] = []
    for sign_report in sign_reports:
        try:
            p = refine_critical_point(poly, sign_report.location)
            numeric = classify_numeric(poly, p, center_tol)
        except TorusDynamicsError as e:
            logger.warning("Type II point %s: %s", sign_report.location.as_strings(), e)
            failures.append({"location": sign_report.location.as_strings(), "error": str(e)})
            out.append(sign_report)
            continue
        sign_report.location = p
        sign_report.eigen = numeric.eigen
        sign_report.morse_index = numeric.morse_index
        sign_report.residual = numeric.residual
        if numeric.classification != sign_report.classification:
            logger.warning(
                "Type II point %s: sign analysis %s, eigenvalues %s",
                p.to_list(),
                sign_report.classification.value,
                numeric.classification.value,
            )
            failures.append(
                {
                    "location": p.to_list(),
                    "error": "sign analysis and eigenvalues disagree",
                    "sign_analysis": sign_report.classification.value,
                    "eigenvalues": numeric.classification.value,
                }
            )
        out.append(sign_report)
    for k1, k2 in lattice_indices(lead):
        seed = type_i_point(lead, k1, k2)
        try:
            p = refine_critical_point(poly, seed)
            report = classify_numeric(poly, p, center_tol)
        except TorusDynamicsError as e:
            logger.warning("Type I point %s: %s", seed.as_strings(), e)
            failures.append({"location": seed.as_strings(), "error": str(e)})
            continue
        report.point_type = PointType.I
        report.lattice_indices = (k1, k2)
        out.append(report)
    return out


def analyse_table(
    table: ModeTable,
    *,
    max_s: int | None = None,
    tie_tol: float | None = None,
    center_tol: float | None = None,
    workers: int | None = None,
) -> dict[str, Any]:
    """
    Pętla po s na gotowej tabeli modów. Zwraca słownik z s0, raportami punktów krytycznych,
    historią per s i liczbą sprawdzonych permutacji remisów. Brak s0 ≤ max_s → PipelineExhaustedError
    z częściowym wynikiem.
    """
    max_s = config.MAX_S if max_s is None else max_s
    center_tol = config.CENTER_TOL if center_tol is None else center_tol
    workers = max(1, workers or config.WORKERS)

    modes = [e for e in table.two_dimensional() if abs(e.ratio) >= config.MIN_RATIO]
    if not modes:
        raise NotEnoughModesError("Spectrum has no two-dimensional mode above the noise floor")
    filtered = ModeTable.from_coefficients([(e.mode, e.coeff) for e in modes])
    modes = list(filtered)
    lead = modes[0].mode
    lead_sign = 1 if modes[0].coeff > 0 else -1
    blocks = tied_blocks(filtered, tie_tol)
    if blocks and blocks[0][0] == 0:
        logger.warning("Leading mode %s is tied; lattice taken from the canonical order", lead.label())

    result: dict[str, Any] = {
        "lead_mode": lead.to_dict(),
        "lead_coefficient": modes[0].coeff,
        "modes": [e.mode.to_dict() | {"coeff": e.coeff, "ratio": e.ratio} for e in modes[: max_s + 1]],
        "tie_blocks": [[modes[i].mode.label() for i in range(a, b)] for a, b in blocks],
        "history": [],
        "s0": None,
        "reports": [],
        "permutations_checked": 0,
        "poincare_hopf": None,
        "poincare_hopf_skipped": 0,
        "failures": [],
    }

    poly: TrigPolynomial | None = None
    for s in range(max_s + 1):
        if s + 1 > len(modes):
            logger.warning("Spectrum exhausted at s=%d (%d two-dimensional modes)", s, len(modes))
            break
        poly = _truncation(modes[: s + 1], lead_sign)
        reports = _classify_type_ii(poly, lead, workers)
        centers = sum(1 for r in reports if r.classification == Classification.CENTER)
        entry: dict[str, Any] = {
            "s": s,
            "modes": [e.mode.label() for e in modes[: s + 1]],
            "centers": centers,
            "verdicts": [
                {
                    "lattice_indices": list(r.lattice_indices or ()),
                    "classification": r.classification.value,
                    "sign_triple": r.sign_triple.to_dict() if r.sign_triple else None,
                    "note": r.note,
                }
                for r in reports
            ],
            "tie": None,
        }
        for a, b in blocks:
            if 1 <= a <= s and b >= s + 2:
                entry["tie"] = _tie_check(modes, s, (a, b), _verdicts(reports), lead_sign, workers)
                result["permutations_checked"] += entry["tie"]["permutations_checked"]
        result["history"].append(entry)
        logger.info("s=%d: %d of %d type II points still centers", s, centers, len(reports))
        if centers == 0:
            result["s0"] = s
            result["reports"] = _refine_reports(poly, lead, reports, center_tol, result["failures"])
            _audit(result)
            logger.info("Resolved at s0=%d (Poincare-Hopf sum %s)", s, result["poincare_hopf"])
            return result

    if poly is not None:
        last = _classify_type_ii(poly, lead, workers)
        result["reports"] = _refine_reports(poly, lead, last, center_tol, result["failures"])
        _audit(result)
    raise PipelineExhaustedError("No truncation up to s=%d resolves every type II center" % max_s, result)


def _audit(result: dict[str, Any]) -> None:
    audit = poincare_hopf_audit(result["reports"])
    result["poincare_hopf"] = audit.index_sum
    result["poincare_hopf_skipped"] = audit.skipped


def _save_result(result: dict[str, Any], out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = save_json(result, out_dir / "pipeline.json")
    (out_dir / "summary.txt").write_text(summarize(result), encoding="utf-8")
    return path


def summarize(result: dict[str, Any]) -> str:
    lines = []
    s0 = result.get("s0")
    lines.append("s0: %s" % (s0 if s0 is not None else "not reached"))
    lines.append("permutations checked: %d" % result.get("permutations_checked", 0))
    for r in result.get("reports", []):
        d = r.to_dict() if hasattr(r, "to_dict") else r
        lines.append("%-6s %-24s %s" % (d["point_type"], d["location"], d["classification"]))
    line = "Poincare-Hopf sum: %s" % result.get("poincare_hopf")
    skipped = result.get("poincare_hopf_skipped", 0)
    if skipped:
        line += " (partial, %d degenerate points skipped)" % skipped
    lines.append(line)
    return "\n".join(lines) + "\n"
