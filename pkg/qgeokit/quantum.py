# qgeokit/quantum.py
# Wave-function view of the Kahler space: Madelung map, Dirac product, and the
# length/distance of curves of states.
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.integrate import trapezoid

from qgeokit.config import GeometryConfig
from qgeokit.errors import DimensionError, GridError
from qgeokit.kahler import complex_coordinate_triple
from qgeokit.simplex import ProbabilityVector, _check_grid
from qgeokit.symplectic import PhasePoint

NORM_TOL = 1e-12
DIRAC_TOL = 1e-14


@dataclass(frozen=True)
class WaveVector:
    """Amplitudes psi^i. Normalization is checked by the operations that need it."""

    psi: np.ndarray

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 1 or psi.size < 1:
            raise DimensionError(f"wave vector must be 1-d, got shape {psi.shape}")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def n(self) -> int:
        return self.psi.size

    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.psi, self.psi)))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol


def _require_normalized(*states: WaveVector) -> None:
    for w in states:
        if not w.is_normalized():
            raise ValueError(f"state is not normalized: sum |psi|^2 = {w.norm_squared():.17g}")


def _require_same_dim(a: WaveVector, b: WaveVector) -> None:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")


@dataclass(frozen=True)
class WavePath:
    states: np.ndarray
    grid: np.ndarray = field(default=None)

    def __post_init__(self):
        st = np.array(self.states, dtype=complex)
        if st.ndim != 2 or st.shape[0] < 2:
            raise GridError(f"a path needs at least 2 samples, got shape {st.shape}")
        grid = np.linspace(0.0, 1.0, st.shape[0]) if self.grid is None else np.array(self.grid, dtype=float)
        _check_grid(grid, st.shape[0])
        norms = np.sum(np.abs(st) ** 2, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise ValueError("every path sample must be normalized")
        st.setflags(write=False)
        grid.setflags(write=False)
        object.__setattr__(self, "states", st)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_vectors(cls, samples: List[WaveVector], grid=None) -> "WavePath":
        return cls(np.stack([w.psi for w in samples]), grid)

    @property
    def samples(self) -> List[WaveVector]:
        return [WaveVector(row) for row in self.states]


def normalize(psi: WaveVector) -> WaveVector:
    return WaveVector(psi.psi / np.sqrt(psi.norm_squared()))


def global_phase(psi: WaveVector, chi: float) -> WaveVector:
    return WaveVector(psi.psi * np.exp(1j * chi))


def madelung(pt: PhasePoint, cfg: GeometryConfig) -> WaveVector:
    """psi^i = sqrt(P^i) exp(i S^i / alpha)."""
    return WaveVector(np.sqrt(pt.p.p) * np.exp(1j * pt.s / cfg.alpha))


def phases(psi: np.ndarray, alpha: float) -> np.ndarray:
    """S^i = alpha arg(psi^i) on (-pi alpha, pi alpha], zero where psi^i = 0."""
    theta = np.angle(psi)
    theta = np.where(theta <= -np.pi, np.pi, theta)
    theta = np.where(psi == 0, 0.0, theta)
    return alpha * theta


def inverse_madelung(psi: WaveVector, cfg: GeometryConfig) -> PhasePoint:
    _require_normalized(psi)
    p = np.abs(psi.psi) ** 2
    return PhasePoint(ProbabilityVector(p), phases(psi.psi, cfg.alpha))


def dirac_product(phi: WaveVector, varphi: WaveVector, cfg: GeometryConfig) -> complex:
    """<phi|varphi> = 1/2 (phi, conj phi) [g + i Omega] (varphi, conj varphi)^T = sum conj(phi) varphi.

    g and Omega are the constant complex-coordinate tensors with alpha scaled out.
    """
    _require_same_dim(phi, varphi)
    cc = complex_coordinate_triple(cfg, phi.n)
    kernel = (cc.g + 1j * cc.omega) / cfg.alpha
    left = np.concatenate([phi.psi, np.conj(phi.psi)])
    right = np.concatenate([varphi.psi, np.conj(varphi.psi)])
    from_tensors = 0.5 * left @ kernel @ right
    direct = complex(np.vdot(phi.psi, varphi.psi))
    scale = max(1.0, float(np.linalg.norm(phi.psi) * np.linalg.norm(varphi.psi)))
    assert abs(from_tensors - direct) <= DIRAC_TOL * scale, (
        f"Dirac product mismatch: {from_tensors} vs {direct}")
    return direct


def complex_curve_length(path: WavePath, cfg: GeometryConfig) -> float:
    """sqrt(2 alpha) * integral of sqrt(sum_i |d psi^i / dt|^2) dt, trapezoidal."""
    edge = 2 if path.states.shape[0] >= 3 else 1
    v = np.gradient(path.states, path.grid, axis=0, edge_order=edge)
    speed = np.sqrt(np.sum(np.abs(v) ** 2, axis=1))
    return float(np.sqrt(2.0 * cfg.alpha) * trapezoid(speed, path.grid))


def quantum_statistical_distance(psi_A: WaveVector, psi_B: WaveVector, cfg: GeometryConfig) -> float:
    """sqrt(2 alpha) arccos |<psi_A|psi_B>|, blind to the global phase of either state."""
    _require_same_dim(psi_A, psi_B)
    _require_normalized(psi_A, psi_B)
    overlap = np.vdot(psi_A.psi, psi_B.psi)
    # chord between psi_A and the phase-aligned psi_B: 2 arcsin(chord / 2) = arccos |overlap|
    aligned = psi_B.psi * np.exp(-1j * np.angle(overlap))
    chord = float(np.linalg.norm(aligned - psi_A.psi))
    return float(np.sqrt(2.0 * cfg.alpha) * 2.0 * np.arcsin(min(chord / 2.0, 1.0)))


def great_circle_path(psi_A: WaveVector, psi_B: WaveVector, samples: int) -> WavePath:
    """Shortest curve on the unit sphere from psi_A to psi_B with psi_B's phase aligned to psi_A."""
    _require_same_dim(psi_A, psi_B)
    _require_normalized(psi_A, psi_B)
    overlap = np.vdot(psi_A.psi, psi_B.psi)
    target = psi_B.psi * (np.exp(-1j * np.angle(overlap)) if overlap != 0 else 1.0)
    theta = float(np.arccos(np.clip(abs(overlap), 0.0, 1.0)))
    t = np.linspace(0.0, 1.0, samples)
    if theta == 0.0:
        return WavePath(np.tile(psi_A.psi, (samples, 1)), t)
    states = (np.sin((1.0 - t) * theta)[:, None] * psi_A.psi
              + np.sin(t * theta)[:, None] * target) / np.sin(theta)
    return WavePath(states, t)
