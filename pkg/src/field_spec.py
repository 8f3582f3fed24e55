"""
Rozpoznawanie źródła funkcji kosztu: "gan", plik JSON z wielomianem albo CSV z próbkami siatki.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from src.dynamics import Field
from src.errors import FieldSpecError
from src.gan_model import GanConfig, GanCostField
from src.spectral import GridField, load_grid
from src.trig_poly import load_polynomial

logger = logging.getLogger(__name__)

GAN_SPEC = "gan"


def is_gan_spec(spec: str) -> bool:
    return spec.strip().lower() == GAN_SPEC


def resolve_field(spec: str, gan_cfg: Optional[GanConfig] = None) -> tuple[Field, str]:
    """Zwraca (pole, opis do manifestu)."""
    if is_gan_spec(spec):
        cfg = gan_cfg or GanConfig()
        field = GanCostField(cfg)
        return field, repr(field)
    path = Path(spec)
    suffix = path.suffix.lower()
    if suffix not in (".json", ".csv"):
        raise FieldSpecError("Unknown field spec %r (expected 'gan', *.json or *.csv)" % spec)
    if not path.exists():
        raise FieldSpecError("Field file not found: %s" % path)
    try:
        if suffix == ".json":
            poly = load_polynomial(path)
            logger.info("Loaded polynomial with %d terms from %s", len(poly), path)
            return poly, "polynomial:%s" % path.name
        samples = load_grid(path)
    except (ValueError, KeyError) as e:
        raise FieldSpecError("Cannot read field from %s: %s" % (path, e)) from e
    logger.info("Loaded %d x %d grid from %s", samples.n1, samples.n2, path)
    return GridField(samples), "grid:%s" % path.name
