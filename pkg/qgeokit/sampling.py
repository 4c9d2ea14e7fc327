# qgeokit/sampling.py
# Seeded random states for the verification suites.
import numpy as np

from qgeokit.config import GeometryConfig
from qgeokit.quantum import WaveVector
from qgeokit.simplex import ProbabilityVector
from qgeokit.symplectic import PhasePoint


def random_interior(n: int, rng: np.random.Generator, low: float = 0.5, high: float = 1.5) -> ProbabilityVector:
    """Uniform weights in [low, high), normalized; keeps every P^i of order 1/n."""
    return ProbabilityVector.normalized(rng.uniform(low, high, n))


def random_phase_point(n: int, rng: np.random.Generator, cfg: GeometryConfig,
                       low: float = 0.5, high: float = 1.5) -> PhasePoint:
    p = random_interior(n, rng, low, high)
    s = cfg.alpha * rng.uniform(-np.pi, np.pi, n)
    return PhasePoint(p, s)


def random_wave(n: int, rng: np.random.Generator) -> WaveVector:
    """Normalized complex Gaussian vector (Haar-distributed ray)."""
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return WaveVector(z / np.linalg.norm(z))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def random_symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    """Complex symmetric (not Hermitian) matrix, the shape of the N block."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.T)
