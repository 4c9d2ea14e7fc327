# qgeokit/dynamics.py
# Ensemble Hamiltonians, exact unitary propagation, and the implicit-midpoint
# integrator in the canonical (x, y) chart.
import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import scipy.linalg as la

from qgeokit.config import GeometryConfig
from qgeokit.errors import DimensionError, HermitianError, NonconvergenceError
from qgeokit.quantum import WaveVector, _require_normalized, dirac_product, phases
from qgeokit.simplex import ProbabilityVector
from qgeokit.symplectic import ObservableFunction, PhasePoint, _ps_to_xy, _xy_to_ps

STRUCTURE_TOL = 1e-14
HERMITIAN_TOL = 1e-12
MIDPOINT_TOL = 1e-13
MIDPOINT_MAX_ITER = 50
CONSERVATION_TOL = 1e-9


def _zero_energy(t: float) -> float:
    return 0.0


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H = E(t) + sum M_jk conj(psi^j) psi^k + N_jk psi^j psi^k + conj(N_jk) conj(psi^j) conj(psi^k)."""

    m: np.ndarray
    nmat: Optional[np.ndarray] = None
    e: Callable[[float], float] = field(default=_zero_energy)

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"M must be square, got {m.shape}")
        nmat = np.zeros_like(m) if self.nmat is None else np.array(self.nmat, dtype=complex)
        if nmat.shape != m.shape:
            raise DimensionError(f"N has shape {nmat.shape}, M has shape {m.shape}")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > STRUCTURE_TOL:
            raise HermitianError(f"M is not Hermitian (residual {herm:.3g})", herm)
        sym = float(np.max(np.abs(nmat - nmat.T)))
        if sym > STRUCTURE_TOL:
            raise ValueError(f"N is not symmetric (residual {sym:.3g})")
        for a in (m, nmat):
            a.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "nmat", nmat)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def is_gauge_invariant(self) -> bool:
        return not np.any(self.nmat)


def _require_dim(H: QuadraticHamiltonian, psi: np.ndarray) -> None:
    if psi.shape != (H.n,):
        raise DimensionError(f"state has shape {psi.shape}, Hamiltonian acts on {H.n} states")


def _energy(H: QuadraticHamiltonian, psi: np.ndarray, t: float) -> float:
    q = psi @ H.nmat @ psi
    value = H.e(t) + np.vdot(psi, H.m @ psi) + q + np.conj(q)
    return float(np.real(value))


def hamiltonian_value(H: QuadraticHamiltonian, psi: WaveVector, t: float = 0.0) -> float:
    _require_dim(H, psi.psi)
    return _energy(H, psi.psi, t)


def gauge_variance(H: QuadraticHamiltonian, psi: WaveVector, chis: Sequence[float], t: float = 0.0) -> float:
    """max over chi of |H(psi e^{i chi}) - H(psi)|; only the N block can make it nonzero."""
    _require_dim(H, psi.psi)
    _require_normalized(psi)
    base = _energy(H, psi.psi, t)
    return max((abs(_energy(H, psi.psi * np.exp(1j * chi), t) - base) for chi in chis), default=0.0)


def gauge_blind(H: QuadraticHamiltonian, states: Iterable[WaveVector], chis: Sequence[float],
                t: float = 0.0, tol: float = 1e-13) -> bool:
    """True when H is phase-blind on every sampled state; on a spanning sample this means N = 0."""
    return all(gauge_variance(H, psi, chis, t) < tol for psi in states)


def schrodinger_velocity(H: QuadraticHamiltonian, psi: WaveVector, cfg: GeometryConfig) -> np.ndarray:
    """d psi/dt = -(i/alpha) dH/d conj(psi) = -(i/alpha) (M psi + 2 conj(N) conj(psi))."""
    _require_dim(H, psi.psi)
    return -1j / cfg.alpha * (H.m @ psi.psi + 2.0 * np.conj(H.nmat) @ np.conj(psi.psi))


def norm_rate(H: QuadraticHamiltonian, psi: WaveVector, cfg: GeometryConfig) -> float:
    """d/dt sum |psi|^2 along the flow, -(4/alpha) Im Q with Q = sum N_jk psi^j psi^k."""
    _require_dim(H, psi.psi)
    q = psi.psi @ H.nmat @ psi.psi
    return float(-4.0 / cfg.alpha * np.imag(q))


def hamiltonian_observable(H: QuadraticHamiltonian, cfg: GeometryConfig, t: float = 0.0) -> ObservableFunction:
    """H as a function of (P, S) through the Madelung map."""
    def value(p, s):
        return _energy(H, np.sqrt(p) * np.exp(1j * s / cfg.alpha), t)
    return ObservableFunction(value, name="H")


def wave_observable(j: int, cfg: GeometryConfig, conjugate: bool = False) -> ObservableFunction:
    """psi^j (or its conjugate) as a complex function of (P, S)."""
    sign = -1.0 if conjugate else 1.0

    def value(p, s):
        return np.sqrt(p[j]) * np.exp(sign * 1j * s[j] / cfg.alpha)
    return ObservableFunction(value, name=f"{'conj_' if conjugate else ''}psi{j}")


# -------------------
# Exact propagation
# -------------------
def _hermitian_residual(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - M.conj().T)))


def propagator(M: np.ndarray, t: float, cfg: GeometryConfig) -> np.ndarray:
    """U = exp(-i M t / alpha) from the Hermitian eigendecomposition of M."""
    M = np.asarray(M, dtype=complex)
    residual = _hermitian_residual(M)
    if residual > HERMITIAN_TOL:
        raise HermitianError(f"M is not Hermitian (residual {residual:.3g})", residual)
    if not np.any(M):
        return np.eye(M.shape[0], dtype=complex)
    w, v = la.eigh(M)
    return (v * np.exp(-1j * w * t / cfg.alpha)) @ v.conj().T


def evolve_exact(M: np.ndarray, psi0: WaveVector, t: float, cfg: GeometryConfig) -> WaveVector:
    _require_normalized(psi0)
    return WaveVector(propagator(M, t, cfg) @ psi0.psi)


def unitarity_check(M: np.ndarray, t: float, cfg: GeometryConfig, check_hermitian: bool = True) -> float:
    """max |U^dagger U - 1| for U = exp(-i M t / alpha).

    check_hermitian=False skips the Hermitian guard and exponentiates M as a
    general matrix, so non-Hermitian input shows up as a growing residual.
    """
    M = np.asarray(M, dtype=complex)
    if check_hermitian:
        U = propagator(M, t, cfg)
    else:
        U = la.expm(-1j * M * t / cfg.alpha)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(M.shape[0]))))


# -------------------
# Trajectories
# -------------------
@dataclass(frozen=True)
class Trajectory:
    """States psi(t_k), one row per time; (P, S) views come from the canonical chart."""

    times: np.ndarray
    states: np.ndarray
    alpha: float

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        states = np.array(self.states, dtype=complex)
        if states.ndim != 2 or times.shape != (states.shape[0],):
            raise DimensionError(f"{times.size} times for states of shape {states.shape}")
        if times.size and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be increasing")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.times.size

    @property
    def final(self) -> WaveVector:
        return WaveVector(self.states[-1])

    def wave(self, k: int) -> WaveVector:
        return WaveVector(self.states[k])

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)

    def p(self) -> np.ndarray:
        x, y = self.xy()
        return _xy_to_ps(x, y, self.alpha)[0]

    def s(self) -> np.ndarray:
        return phases(self.states, self.alpha)

    def xy(self):
        scale = np.sqrt(2.0 * self.alpha)
        return scale * self.states.real, scale * self.states.imag

    def phase_point(self, k: int) -> PhasePoint:
        """(P, S) at step k; requires the state to be normalized."""
        return PhasePoint(ProbabilityVector(self.p()[k]), self.s()[k])

    def energies(self, H: QuadraticHamiltonian) -> np.ndarray:
        return np.array([_energy(H, psi, 0.0) for psi in self.states])

    def to_csv(self, path: Path, H: QuadraticHamiltonian) -> Path:
        """Columns t, P^i, S^i, Re psi^i, Im psi^i, norm, energy at 17 significant digits."""
        n = self.states.shape[1]
        header = (["t"] + [f"P{i + 1}" for i in range(n)] + [f"S{i + 1}" for i in range(n)]
                  + [f"Re_psi{i + 1}" for i in range(n)] + [f"Im_psi{i + 1}" for i in range(n)]
                  + ["norm", "energy"])
        p, s, norms, energy = self.p(), self.s(), self.norms(), self.energies(H)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            for k, t in enumerate(self.times):
                row = [t, *p[k], *s[k], *self.states[k].real, *self.states[k].imag, norms[k], energy[k]]
                w.writerow([f"{v:.16e}" for v in row])
        return path


def evolve_exact_trajectory(M: np.ndarray, psi0: WaveVector, times: Sequence[float],
                            cfg: GeometryConfig) -> Trajectory:
    _require_normalized(psi0)
    M = np.asarray(M, dtype=complex)
    residual = _hermitian_residual(M)
    if residual > HERMITIAN_TOL:
        raise HermitianError(f"M is not Hermitian (residual {residual:.3g})", residual)
    w, v = la.eigh(M)
    coeff = v.conj().T @ psi0.psi
    times = np.asarray(times, dtype=float)
    states = (np.exp(-1j * np.outer(times, w) / cfg.alpha) * coeff) @ v.T
    return Trajectory(times, states, cfg.alpha)


def _xy_velocity(H: QuadraticHamiltonian, z: np.ndarray, alpha: float) -> np.ndarray:
    """Hamilton's equations in the canonical chart: dx/dt = dH/dy, dy/dt = -dH/dx."""
    n = H.n
    scale = np.sqrt(2.0 * alpha)
    psi = (z[:n] + 1j * z[n:]) / scale
    # dH/dx + i dH/dy = (2 / sqrt(2 alpha)) dH/d conj(psi)
    grad = (2.0 / scale) * (H.m @ psi + 2.0 * np.conj(H.nmat) @ np.conj(psi))
    return np.concatenate([grad.imag, -grad.real])


def evolve_symplectic(H: QuadraticHamiltonian, pt0: PhasePoint, dt: float, steps: int,
                      cfg: GeometryConfig) -> Trajectory:
    """Implicit midpoint rule in (x, y), solved by fixed-point iteration.

    The chart is regular at P^i = 0, and the midpoint rule keeps every quadratic
    invariant of a linear flow, so the norm is conserved up to round-off when N = 0.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if pt0.n != H.n:
        raise DimensionError(f"phase point has {pt0.n} states, Hamiltonian acts on {H.n}")
    x0, y0 = _ps_to_xy(pt0.p.p, pt0.s, cfg.alpha)
    z = np.concatenate([x0, y0])
    out = np.empty((steps + 1, 2 * H.n))
    out[0] = z
    for k in range(steps):
        guess = z + dt * _xy_velocity(H, z, cfg.alpha)
        for _ in range(MIDPOINT_MAX_ITER):
            nxt = z + dt * _xy_velocity(H, 0.5 * (z + guess), cfg.alpha)
            delta = float(np.max(np.abs(nxt - guess)))
            guess = nxt
            if delta <= MIDPOINT_TOL * max(1.0, float(np.max(np.abs(nxt)))):
                break
        else:
            raise NonconvergenceError(
                f"implicit midpoint step {k} did not converge in {MIDPOINT_MAX_ITER} iterations",
                step=k, residual=delta)
        z = guess
        out[k + 1] = z
    n = H.n
    states = (out[:, :n] + 1j * out[:, n:]) / np.sqrt(2.0 * cfg.alpha)
    return Trajectory(dt * np.arange(steps + 1), states, cfg.alpha)


@dataclass(frozen=True)
class ConservationReport:
    norm_drift: float
    energy_drift: float
    dirac_drift: Optional[float]
    tolerance: float = CONSERVATION_TOL

    @property
    def passed(self) -> bool:
        drifts = [self.norm_drift, self.energy_drift]
        if self.dirac_drift is not None:
            drifts.append(self.dirac_drift)
        return all(d < self.tolerance for d in drifts)


def conservation_report(traj: Trajectory, H: QuadraticHamiltonian, cfg: GeometryConfig,
                        reference: Optional[Trajectory] = None) -> ConservationReport:
    """Norm, energy and (against a co-evolved reference) Dirac-product drift along traj."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    norm_drift = float(np.max(np.abs(traj.norms() - 1.0)))
    energies = traj.energies(H)
    energy_drift = float(np.max(np.abs(energies - energies[0])))
    dirac_drift = None
    if reference is not None:
        if len(reference) != len(traj):
            raise DimensionError("reference trajectory must share the time grid")
        start = dirac_product(reference.wave(0), traj.wave(0), cfg)
        dirac_drift = float(max(abs(dirac_product(reference.wave(k), traj.wave(k), cfg) - start)
                                for k in range(len(traj))))
    return ConservationReport(norm_drift, energy_drift, dirac_drift)
