"""Konfiguracja – ścieżki, progi numeryczne i parametry modelu GAN (nadpisywane przez TORUS_*)."""
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Ścieżki
PROJECT_ROOT = Path(__file__).resolve().parent
DATA_DIR = PROJECT_ROOT / "data"
OUTPUT_DIR = DATA_DIR / "output"

# Próbkowanie i widmo: siatka N×N, maks. częstotliwość w tabeli modów
GRID_SIZE = int(os.getenv("TORUS_GRID_SIZE", "64"))
MAX_FREQ = int(os.getenv("TORUS_MAX_FREQ", "10"))
# Węzły kwadratury na oś dla pojedynczego współczynnika
NODES_PER_AXIS = int(os.getenv("TORUS_NODES_PER_AXIS", "64"))
# Reguła widma: fft (siatka okresowa) albo rectangular (siatka domknięta, węzły θ = 0 i θ = 1);
# koszt GAN domyślnie regułą prostokątów na siatce RECT_NODES×RECT_NODES
QUADRATURE = os.getenv("TORUS_QUADRATURE", "fft")
GAN_QUADRATURE = os.getenv("TORUS_GAN_QUADRATURE", "rectangular")
RECT_NODES = int(os.getenv("TORUS_RECT_NODES", "51"))

# Pipeline: maks. poziom obcięcia s, próg remisu (względem |a0|), próg szumu dla Θ_s
MAX_S = int(os.getenv("TORUS_MAX_S", "10"))
TIE_TOL = float(os.getenv("TORUS_TIE_TOL", "1e-3"))
MIN_RATIO = float(os.getenv("TORUS_MIN_RATIO", "1e-9"))
# Limit sprawdzanych permutacji w bloku remisowym
MAX_TIE_PERMUTATIONS = int(os.getenv("TORUS_MAX_TIE_PERMUTATIONS", "64"))

# Klasyfikacja: |Re λ| ≤ CENTER_TOL·|Im λ| → Center
CENTER_TOL = float(os.getenv("TORUS_CENTER_TOL", "1e-7"))

# Newton: tolerancja residuum (wielomiany / pola czarnej skrzynki), limit iteracji
NEWTON_TOL = float(os.getenv("TORUS_NEWTON_TOL", "1e-12"))
NEWTON_TOL_FD = float(os.getenv("TORUS_NEWTON_TOL_FD", "1e-8"))
NEWTON_MAX_ITER = int(os.getenv("TORUS_NEWTON_MAX_ITER", "50"))
# Krok różnic centralnych dla pól bez wzoru (GAN, siatka)
FD_STEP = float(os.getenv("TORUS_FD_STEP", "1e-4"))

# Przepływ: krok RK4, liczba kroków, horyzont czasu, siatka punktów startowych portretu
DT = float(os.getenv("TORUS_DT", "1e-3"))
STEPS = int(os.getenv("TORUS_STEPS", "20000"))
FLOW_T_END = float(os.getenv("TORUS_FLOW_T_END", "20"))
SEED_GRID = int(os.getenv("TORUS_SEED_GRID", "10"))

# Model GAN: parametr danych ω, obcięcie całki, liczba węzłów Simpsona (nieparzysta)
GAN_OMEGA = float(os.getenv("TORUS_GAN_OMEGA", "0.25"))
GAN_X_CUTOFF = float(os.getenv("TORUS_GAN_X_CUTOFF", "40"))
GAN_SIMPSON_NODES = int(os.getenv("TORUS_GAN_SIMPSON_NODES", "401"))
# Cache kosztu GAN: rozdzielczość klucza i maks. liczba wpisów
GAN_CACHE_RESOLUTION = float(os.getenv("TORUS_GAN_CACHE_RESOLUTION", "1e-9"))
GAN_CACHE_MAX_ENTRIES = int(os.getenv("TORUS_GAN_CACHE_MAX_ENTRIES", "500000"))

# Wątki: próbkowanie siatki i punkty siatki w pipeline
WORKERS = int(os.getenv("TORUS_WORKERS", "4"))

# Wyjście: rozmiar SVG/PNG w px, nadpróbkowanie PNG, cyfry po przecinku w JSON/CSV
SVG_SIZE_PX = int(os.getenv("TORUS_SVG_SIZE_PX", "800"))
PNG_SIZE_PX = int(os.getenv("TORUS_PNG_SIZE_PX", "800"))
PNG_SUPERSAMPLE = int(os.getenv("TORUS_PNG_SUPERSAMPLE", "3"))
FLOAT_DIGITS = int(os.getenv("TORUS_FLOAT_DIGITS", "6"))
