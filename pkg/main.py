#!/usr/bin/env python3
"""
TorusMinMax – analiza Fouriera i przepływu Nasha dla gier min-max na torusie T².

Użycie:
  python main.py coeffs gan --max-freq 10
  python main.py coeffs gan --quadrature fft --grid 64
  python main.py classify --lead 1,1,0,0 --mu 0.03 --pert 3,5,1,1
  python main.py classify poly.json
  python main.py flow poly.json --seed 0.3,0.3 --flow nash
  python main.py portrait gan --flow nash --png
  python main.py gan-table
  python main.py pipeline gan --max-s 10

Kody wyjścia: 0 sukces, 1 błędne wejście, 2 centrum/punkt zdegenerowany (decyzja odroczona),
3 brak zbieżności Newtona, 4 pipeline bez rozstrzygnięcia do max_s.
"""
import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional

# dodaj root projektu do ścieżki
sys.path.insert(0, str(Path(__file__).resolve().parent))

import config
from src.dynamics import (
    Classification,
    CriticalPointReport,
    PointType,
    basis_critical_points,
    classify_numeric,
    lattice_critical_points,
    lattice_indices,
    poincare_hopf_audit,
    refine_critical_point,
    refine_seeds,
    type_i_point,
)
from src.errors import (
    DegenerateSignError,
    LeftBasinError,
    NoConvergenceError,
    PipelineExhaustedError,
    TorusDynamicsError,
)
from src.field_spec import is_gan_spec, resolve_field
from src.flow_sim import FlowKind, default_dt, default_steps, integrate, portrait
from src.gan_model import GanConfig, GanCostField, density_mass
from src.pipeline import run_pipeline, summarize
from src.portrait_render import write_png, write_svg, write_trajectories_csv
from src.run_manifest import RunManifest, save_json
from src.sign_analysis import classify_two_term
from src.spectral import ModeTable, Quadrature, default_grid, field_spectrum, save_grid
from src.trig_poly import TorusPoint, TrigMode, TrigPolynomial, load_polynomial

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DEFERRED = 2
EXIT_NO_CONVERGENCE = 3
EXIT_EXHAUSTED = 4

# modu (1,1,1,1) używamy jako siatki startowej dla pól bez wzoru (GAN, siatka)
BLACK_BOX_SEED_MODE = TrigMode(1, 1, 1, 1)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out) if args.out else config.OUTPUT_DIR / args.command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _gan_config(args: argparse.Namespace) -> GanConfig:
    return GanConfig(omega=args.omega, x_cutoff=args.x_cutoff, simpson_nodes=args.simpson_nodes)


def _spectrum_options(args: argparse.Namespace, gan: bool) -> tuple[Quadrature, int]:
    """Reguła i rozmiar siatki: dla GAN domyślnie reguła prostokątów na siatce domkniętej."""
    quadrature = Quadrature(args.quadrature or (config.GAN_QUADRATURE if gan else config.QUADRATURE))
    return quadrature, args.grid or default_grid(quadrature)


def _print_table(table: ModeTable, n: int = 10) -> None:
    print("%4s %4s %3s %3s %16s %12s" % ("m1", "m2", "a", "b", "coefficient", "ratio"))
    for e in table.top(n):
        m = e.mode
        print("%4d %4d %3d %3d %16.8e %12.6f" % (m.m1, m.m2, m.alpha, m.beta, e.coeff, e.ratio))


def _finish(manifest: RunManifest, out_dir: Path, started: float) -> None:
    manifest.wall_time = round(time.perf_counter() - started, 3)
    manifest.write(out_dir)


def cmd_coeffs(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args)
    field, descriptor = resolve_field(args.field, _gan_config(args))
    quadrature, grid = _spectrum_options(args, is_gan_spec(args.field))
    samples, table = field_spectrum(field, grid, args.max_freq, quadrature)
    if not args.all_modes:
        table = table.two_dimensional()
    manifest = RunManifest(
        "coeffs",
        {
            "field": descriptor,
            "grid": grid,
            "max_freq": args.max_freq,
            "quadrature": quadrature.value,
            "all_modes": args.all_modes,
        },
    )
    manifest.add_artifact(table.to_csv(out_dir / "coefficients.csv"))
    if args.save_grid:
        manifest.add_artifact(save_grid(samples, out_dir / "grid.csv"))
    _finish(manifest, out_dir, started)
    _print_table(table)
    print("Wynik zapisany w:", out_dir)
    return EXIT_OK


def _two_term_reports(lead: TrigMode, mu: float, pert: TrigMode) -> list[CriticalPointReport]:
    poly = TrigPolynomial(((1.0, lead), (mu, pert)))
    reports = [classify_two_term(lead, mu, pert, k1, k2) for k1, k2 in lattice_indices(lead)]
    for k1, k2 in lattice_indices(lead):
        p = refine_critical_point(poly, type_i_point(lead, k1, k2))
        report = classify_numeric(poly, p)
        report.point_type = PointType.I
        report.lattice_indices = (k1, k2)
        reports.append(report)
    return reports


def cmd_classify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args)
    if args.poly:
        poly = load_polynomial(args.poly)
        params: dict[str, Any] = {"polynomial": str(args.poly)}
        reports = lattice_critical_points(poly, center_tol=args.center_tol)
    elif args.lead and args.pert and args.mu is not None:
        lead = TrigMode.parse(args.lead)
        pert = TrigMode.parse(args.pert)
        params = {"lead": lead.to_dict(), "mu": args.mu, "pert": pert.to_dict()}
        try:
            reports = _two_term_reports(lead, args.mu, pert)
        except DegenerateSignError as e:
            logger.error("Sign analysis undecided: %s", e)
            return EXIT_DEFERRED
    else:
        logger.error("Podaj plik wielomianu albo --lead, --mu i --pert")
        return EXIT_INVALID

    audit = poincare_hopf_audit(reports)
    manifest = RunManifest("classify", params)
    payload = {"reports": reports, "poincare_hopf": audit.index_sum, "poincare_hopf_skipped": audit.skipped}
    manifest.add_artifact(save_json(payload, out_dir / "classify.json"))
    _finish(manifest, out_dir, started)

    for r in reports:
        d = r.to_dict()
        print("%-3s %-24s %s%s" % (d["point_type"], d["location"], d["classification"], " (odroczone)" if r.deferred else ""))
    print("Suma Poincarégo–Hopfa:", audit.index_sum)
    if audit.skipped:
        print("  suma częściowa, pominięte punkty zdegenerowane:", audit.skipped)
    undecided = any(r.deferred or r.classification in (Classification.CENTER, Classification.DEGENERATE) for r in reports)
    return EXIT_DEFERRED if undecided else EXIT_OK


def _parse_seed(text: str) -> TorusPoint:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError("Seed must be 'theta1,theta2', got %r" % text)
    return TorusPoint(float(parts[0]), float(parts[1]))


def cmd_flow(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args)
    field, descriptor = resolve_field(args.field, _gan_config(args))
    dt = args.dt or default_dt(field)
    steps = args.steps or default_steps(dt)
    seed = _parse_seed(args.seed)
    traj = integrate(field, args.flow, seed, dt, steps)
    manifest = RunManifest(
        "flow",
        {"field": descriptor, "flow": args.flow, "seed": seed.to_list(), "dt": dt, "steps": steps},
    )
    manifest.add_artifact(write_trajectories_csv([traj], out_dir / "trajectory.csv"))
    _finish(manifest, out_dir, started)
    print("Punkt końcowy:", traj.end.to_list())
    return EXIT_OK


def _overlay(field: Any) -> list[CriticalPointReport]:
    if isinstance(field, TrigPolynomial):
        try:
            return lattice_critical_points(field)
        except TorusDynamicsError as e:
            logger.warning("No critical-point overlay: %s", e)
            return []
    return refine_seeds(field, basis_critical_points(BLACK_BOX_SEED_MODE).reports)


def cmd_portrait(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args)
    field, descriptor = resolve_field(args.field, _gan_config(args))
    dt = args.dt or default_dt(field)
    steps = args.steps or default_steps(dt)
    result = portrait(field, args.flow, args.seed_grid, dt, steps, descriptor=descriptor)
    points = [] if args.no_critical else _overlay(field)
    manifest = RunManifest(
        "portrait",
        {"field": descriptor, "flow": args.flow, "seed_grid": args.seed_grid, "dt": dt, "steps": steps},
        failures=result.failures,
    )
    manifest.add_artifact(write_svg(result, out_dir / "portrait.svg", points))
    manifest.add_artifact(write_trajectories_csv(result.trajectories, out_dir / "trajectories.csv"))
    if args.png:
        manifest.add_artifact(write_png(result, out_dir / "portrait.png", points))
    _finish(manifest, out_dir, started)
    for r in points:
        print("%-24s %s" % (r.location.to_list(), r.classification.value))
    print("Wynik zapisany w:", out_dir)
    return EXIT_OK


def cmd_gan_table(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args)
    cfg = _gan_config(args)
    logger.info("Data density mass on [0, %g]: %.9f", cfg.x_cutoff, density_mass(cfg.omega, cfg))
    quadrature, grid = _spectrum_options(args, gan=True)
    _, table = field_spectrum(GanCostField(cfg), grid, args.max_freq, quadrature)
    table = table.two_dimensional().top(10)
    manifest = RunManifest(
        "gan-table",
        {"gan": cfg.to_dict(), "grid": grid, "max_freq": args.max_freq, "quadrature": quadrature.value},
    )
    manifest.add_artifact(table.to_csv(out_dir / "gan_table.csv"))
    _finish(manifest, out_dir, started)
    _print_table(table)
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args)
    field, descriptor = resolve_field(args.field, _gan_config(args))
    quadrature, grid = _spectrum_options(args, is_gan_spec(args.field))
    manifest = RunManifest(
        "pipeline",
        {
            "field": descriptor,
            "grid": grid,
            "max_freq": args.max_freq,
            "quadrature": quadrature.value,
            "max_s": args.max_s,
            "tie_tol": args.tie_tol,
        },
        artifact_paths=["pipeline.json", "summary.txt"],
    )
    code = EXIT_OK
    try:
        result = run_pipeline(
            field,
            grid=grid,
            max_freq=args.max_freq,
            quadrature=quadrature,
            max_s=args.max_s,
            tie_tol=args.tie_tol,
            out_dir=out_dir,
        )
    except PipelineExhaustedError as e:
        logger.error("%s", e)
        result = e.result
        code = EXIT_EXHAUSTED
    manifest.failures = result.get("failures", [])
    _finish(manifest, out_dir, started)
    print(summarize(result), end="")
    print("Wynik zapisany w:", out_dir)
    return code


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="Katalog wyjściowy (domyślnie data/output/<komenda>)")
    p.add_argument("--verbose", action="store_true", help="Logi DEBUG")


def _add_gan(p: argparse.ArgumentParser) -> None:
    p.add_argument("--omega", type=float, default=config.GAN_OMEGA, help="Parametr danych ω (domyślnie %s)" % config.GAN_OMEGA)
    p.add_argument("--x-cutoff", type=float, default=config.GAN_X_CUTOFF, help="Obcięcie całki (domyślnie %s)" % config.GAN_X_CUTOFF)
    p.add_argument(
        "--simpson-nodes",
        type=int,
        default=config.GAN_SIMPSON_NODES,
        help="Węzły Simpsona, nieparzyste (domyślnie %s)" % config.GAN_SIMPSON_NODES,
    )


def _add_spectrum(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--grid",
        type=int,
        default=None,
        help="Siatka N×N (domyślnie %s, dla reguły prostokątów %s)" % (config.GRID_SIZE, config.RECT_NODES),
    )
    p.add_argument("--max-freq", type=int, default=config.MAX_FREQ, help="Maks. częstotliwość (domyślnie %s)" % config.MAX_FREQ)
    p.add_argument(
        "--quadrature",
        choices=[q.value for q in Quadrature],
        default=None,
        help="Reguła widma: fft albo rectangular (siatka domknięta); domyślnie %s dla gan, %s dla pozostałych"
        % (config.GAN_QUADRATURE, config.QUADRATURE),
    )


def _add_flow(p: argparse.ArgumentParser) -> None:
    p.add_argument("--flow", choices=[k.value for k in FlowKind], default=FlowKind.NASH.value, help="Rodzaj przepływu (domyślnie nash)")
    p.add_argument("--dt", type=float, default=None, help="Krok RK4 (domyślnie 1e-3 / maks. częstotliwość)")
    p.add_argument("--steps", type=int, default=None, help="Liczba kroków (domyślnie do t = %s)" % config.FLOW_T_END)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="TorusMinMax: widmo Fouriera, klasyfikacja punktów krytycznych i przepływ Nasha na T²")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="Tabela współczynników Fouriera pola")
    p.add_argument("field", help="gan, plik JSON wielomianu lub CSV siatki")
    _add_spectrum(p)
    p.add_argument("--all-modes", action="store_true", help="Także mody jednowymiarowe i stała")
    p.add_argument("--save-grid", action="store_true", help="Zapisz próbki siatki (grid.csv + grid.json)")
    _add_gan(p)
    _add_common(p)

    p = sub.add_parser("classify", help="Klasyfikacja punktów krytycznych")
    p.add_argument("poly", nargs="?", default=None, help="Plik JSON wielomianu")
    p.add_argument("--lead", default=None, help="Mod wiodący m1,m2,α,β")
    p.add_argument("--mu", type=float, default=None, help="Waga zaburzenia, |μ| < 1")
    p.add_argument("--pert", default=None, help="Mod zaburzający n1,n2,γ,δ")
    p.add_argument("--center-tol", type=float, default=config.CENTER_TOL, help="Próg centrum (domyślnie %s)" % config.CENTER_TOL)
    _add_common(p)

    p = sub.add_parser("flow", help="Jedna trajektoria (CSV)")
    p.add_argument("field", help="gan, plik JSON wielomianu lub CSV siatki")
    p.add_argument("--seed", required=True, help="Punkt startowy θ1,θ2")
    _add_flow(p)
    _add_gan(p)
    _add_common(p)

    p = sub.add_parser("portrait", help="Portret fazowy (SVG, CSV, opcjonalnie PNG)")
    p.add_argument("field", help="gan, plik JSON wielomianu lub CSV siatki")
    _add_flow(p)
    p.add_argument("--seed-grid", type=int, default=config.SEED_GRID, help="Punkty startowe n×n (domyślnie %s)" % config.SEED_GRID)
    p.add_argument("--png", action="store_true", help="Dodatkowo podgląd PNG")
    p.add_argument("--no-critical", action="store_true", help="Bez znaczników punktów krytycznych")
    _add_gan(p)
    _add_common(p)

    p = sub.add_parser("gan-table", help="10 największych modów 2D kosztu GAN")
    _add_spectrum(p)
    _add_gan(p)
    _add_common(p)

    p = sub.add_parser("pipeline", help="Pełna metodologia: widmo → obcięcia → klasyfikacja")
    p.add_argument("field", help="gan, plik JSON wielomianu lub CSV siatki")
    _add_spectrum(p)
    p.add_argument("--max-s", type=int, default=config.MAX_S, help="Maks. poziom obcięcia (domyślnie %s)" % config.MAX_S)
    p.add_argument("--tie-tol", type=float, default=config.TIE_TOL, help="Próg remisu względem |a0| (domyślnie %s)" % config.TIE_TOL)
    _add_gan(p)
    _add_common(p)
    return parser


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "coeffs": cmd_coeffs,
    "classify": cmd_classify,
    "flow": cmd_flow,
    "portrait": cmd_portrait,
    "gan-table": cmd_gan_table,
    "pipeline": cmd_pipeline,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        return COMMANDS[args.command](args)
    except (NoConvergenceError, LeftBasinError) as e:
        logger.error("Newton failed: %s", e)
        return EXIT_NO_CONVERGENCE
    except (TorusDynamicsError, ValueError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
