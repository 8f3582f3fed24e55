import csv

from PIL import Image

from src.dynamics import basis_critical_points
from src.flow_sim import integrate_many, portrait, seed_lattice
from src.portrait_render import CSV_HEADER, render_svg, write_png, write_svg, write_trajectories_csv
from src.trig_poly import TrigPolynomial
from tests.conftest import mode


def _small_portrait(field, steps=200):
    return portrait(field, "nash", 3, 0.002, steps, descriptor="test")


def test_svg_is_deterministic(sin_sin):
    first = render_svg(_small_portrait(sin_sin), size=200)
    second = render_svg(_small_portrait(sin_sin), size=200)
    assert first == second
    assert "<svg" in first
    assert "<dc:date>" not in first
    # start w centrum (1/2, 1/2) stoi w miejscu i zostaje kropką
    lines = first.count('id="trajectory-')
    assert lines >= 8
    assert 'id="arrows-' in first


def test_constant_field_draws_dots_only():
    svg = render_svg(_small_portrait(TrigPolynomial.constant(1.0), steps=20), size=100)
    assert 'id="trajectory-' not in svg
    assert svg.count('id="dot-') == 9


def test_critical_points_are_marked(sin_sin, tmp_path):
    census = basis_critical_points(mode(1, 1, 0, 0))
    path = write_svg(_small_portrait(sin_sin), tmp_path / "portrait.svg", census.reports, size=200)
    svg = path.read_text(encoding="utf-8")
    assert svg.count('id="Saddle-') == 4
    assert svg.count('id="Center-') == 4
    assert "test (nash flow)" in svg


def test_png_preview_size(sin_sin, tmp_path):
    path = write_png(_small_portrait(sin_sin), tmp_path / "portrait.png", size=120, supersample=2)
    with Image.open(path) as img:
        assert img.size == (120, 120)
        assert img.format == "PNG"


def test_trajectories_csv(sin_sin, tmp_path):
    trajectories = integrate_many(sin_sin, "nash", seed_lattice(2), 0.01, 5)
    path = write_trajectories_csv(trajectories, tmp_path / "trajectories.csv")
    with open(path, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 4 * 6
    assert rows[1] == ["0", "0.000000", "0.250000", "0.250000"]
