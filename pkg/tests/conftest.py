import sys
from pathlib import Path

import numpy as np
import pytest

# jak w main.py: root projektu na ścieżce
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.gan_model import GanCostField  # noqa: E402
from src.spectral import ModeTable  # noqa: E402
from src.trig_poly import Parity, TrigMode, TrigPolynomial  # noqa: E402

COS = Parity.COS
SIN = Parity.SIN

# referencyjne 10 modów 2D kosztu GAN (ω = 1/4), wszystkie (α, β) = (1, 1)
GAN_REFERENCE_ROWS = [
    ((1, 1), 0.06127),
    ((1, 2), 0.01102),
    ((2, 1), -0.00503),
    ((2, 2), -0.00404),
    ((2, 3), -0.00325),
    ((2, 4), -0.00308),
    ((2, 5), -0.00305),
    ((2, 7), -0.00304),
    ((2, 9), -0.00304),
    ((2, 10), -0.00304),
]


def mode(m1: int, m2: int, alpha: int = 1, beta: int = 1) -> TrigMode:
    return TrigMode(m1, m2, Parity(alpha), Parity(beta))


@pytest.fixture
def reference_table() -> ModeTable:
    return ModeTable.from_coefficients([(mode(m1, m2), c) for (m1, m2), c in GAN_REFERENCE_ROWS])


@pytest.fixture
def reference_polynomial() -> TrigPolynomial:
    return TrigPolynomial(tuple((c, mode(m1, m2)) for (m1, m2), c in GAN_REFERENCE_ROWS))


@pytest.fixture
def sin_sin() -> TrigPolynomial:
    return TrigPolynomial.from_mode(mode(1, 1, 0, 0))


@pytest.fixture(scope="session")
def gan_field() -> GanCostField:
    return GanCostField()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
