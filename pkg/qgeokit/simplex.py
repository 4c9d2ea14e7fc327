# qgeokit/simplex.py
# Information geometry of the discrete probability simplex: metric, curve length,
# closed-form statistical distance and a brute-force geodesic oracle.
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import trapezoid

from qgeokit.config import GeometryConfig
from qgeokit.errors import BoundaryError, ConvergenceError, DimensionError, GridError

SUM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ProbabilityVector:
    """A point P on the n-state probability simplex."""

    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p)
        if p.ndim != 1 or p.size < 1:
            raise DimensionError(f"probability vector must be 1-d, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError(f"probability components must be finite and >= 0: {p}")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum():.17g}, expected 1")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.size

    @classmethod
    def normalized(cls, weights) -> "ProbabilityVector":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())


@dataclass(frozen=True)
class SqrtCoordinates:
    """X^i = sqrt(P^i): a point on the positive orthant of the unit sphere."""

    x: np.ndarray

    def __post_init__(self):
        x = _frozen(self.x)
        if np.any(x < 0):
            raise ValueError("sqrt coordinates must be non-negative")
        if abs(np.linalg.norm(x) - 1.0) > SUM_TOL:
            raise ValueError(f"sqrt coordinates have norm {np.linalg.norm(x):.17g}, expected 1")
        object.__setattr__(self, "x", x)


@dataclass(frozen=True)
class SimplexPath:
    """Samples of a curve P(t) on a strictly increasing grid from 0 to 1.

    `points` holds one sample per row.
    """

    points: np.ndarray
    grid: np.ndarray = field(default=None)

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise GridError(f"a path needs at least 2 samples, got shape {pts.shape}")
        grid = np.linspace(0.0, 1.0, pts.shape[0]) if self.grid is None else self.grid
        grid = _frozen(grid)
        _check_grid(grid, pts.shape[0])
        if np.any(pts < 0) or np.any(np.abs(pts.sum(axis=1) - 1.0) > SUM_TOL):
            raise ValueError("every path sample must be a probability vector")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_vectors(cls, samples: List[ProbabilityVector], grid=None) -> "SimplexPath":
        return cls(np.stack([s.p for s in samples]), grid)

    @property
    def samples(self) -> List[ProbabilityVector]:
        return [ProbabilityVector(row) for row in self.points]


def _check_grid(grid: np.ndarray, count: int) -> None:
    if grid.ndim != 1 or grid.size != count:
        raise GridError(f"grid has {grid.size} entries for {count} samples")
    if grid[0] != 0.0 or grid[-1] != 1.0:
        raise GridError("grid must start at 0 and end at 1")
    if np.any(np.diff(grid) <= 0):
        raise GridError("grid must be strictly increasing")


def _require_interior(p: np.ndarray, floor: float) -> None:
    low = np.flatnonzero(p < floor)
    if low.size:
        i = int(low[0] % p.shape[-1])
        raise BoundaryError(
            f"P^{i} = {p.flat[low[0]]:.3g} is below the boundary floor {floor:.3g}; "
            "the information metric is singular there",
            index=i, value=float(p.flat[low[0]]),
        )


def information_metric(P: ProbabilityVector, cfg: GeometryConfig) -> np.ndarray:
    """G_ij = alpha / (2 P^i) delta_ij."""
    _require_interior(P.p, cfg.boundary_floor)
    return np.diag(cfg.alpha / (2.0 * P.p))


def sqrt_embedding(P: ProbabilityVector) -> SqrtCoordinates:
    return SqrtCoordinates(np.sqrt(P.p))


def from_sqrt(X: SqrtCoordinates) -> ProbabilityVector:
    p = X.x ** 2
    # squaring a unit vector can leave the sum a few ulps off 1
    return ProbabilityVector(p / p.sum())


def _speed(points: np.ndarray, grid: np.ndarray) -> np.ndarray:
    # centered differences inside, second-order one-sided at the ends
    edge = 2 if points.shape[0] >= 3 else 1
    return np.gradient(points, grid, axis=0, edge_order=edge)


def curve_length(path: SimplexPath, cfg: GeometryConfig) -> float:
    """Length of a sampled curve under the information metric.

    The integrand sqrt(G_ij dP^i/dt dP^j/dt) is evaluated at every sample with
    finite-difference velocities and integrated with the trapezoidal rule.
    """
    _require_interior(path.points, cfg.boundary_floor)
    v = _speed(path.points, path.grid)
    integrand = np.sqrt(np.sum(cfg.alpha * v ** 2 / (2.0 * path.points), axis=1))
    return float(trapezoid(integrand, path.grid))


def euclidean_sqrt_length(path: SimplexPath, cfg: GeometryConfig) -> float:
    """sqrt(2 alpha) times the Euclidean length of the image path X(t) = sqrt(P(t))."""
    x = np.sqrt(path.points)
    v = _speed(x, path.grid)
    return float(np.sqrt(2.0 * cfg.alpha) * trapezoid(np.linalg.norm(v, axis=1), path.grid))


def bhattacharyya_coefficient(P_A: ProbabilityVector, P_B: ProbabilityVector) -> float:
    if P_A.n != P_B.n:
        raise DimensionError(f"dimension mismatch: {P_A.n} vs {P_B.n}")
    return float(np.clip(np.sum(np.sqrt(P_A.p * P_B.p)), 0.0, 1.0))


def statistical_distance(P_A: ProbabilityVector, P_B: ProbabilityVector, cfg: GeometryConfig) -> float:
    """sqrt(2 alpha) arccos(sum_i sqrt(P_A^i P_B^i)); regular on the boundary.

    Evaluated as the chord form 2 arcsin(|X_A - X_B| / 2) of the same angle, which
    stays accurate for nearby points where arccos loses half the digits.
    """
    if P_A.n != P_B.n:
        raise DimensionError(f"dimension mismatch: {P_A.n} vs {P_B.n}")
    chord = float(np.linalg.norm(np.sqrt(P_A.p) - np.sqrt(P_B.p)))
    return float(np.sqrt(2.0 * cfg.alpha) * 2.0 * np.arcsin(min(chord / 2.0, 1.0)))


def basis_state(n: int, i: int, floor: Optional[float] = None) -> ProbabilityVector:
    """Vertex e_i of the simplex, optionally pushed into the interior by `floor`."""
    p = np.zeros(n)
    p[i] = 1.0
    if floor:
        p = p * (1.0 - n * floor) + floor
    return ProbabilityVector(p)


def linear_path(P_A: ProbabilityVector, P_B: ProbabilityVector, samples: int,
                spacing: str = "uniform") -> SimplexPath:
    """Straight segment (1-t) P_A + t P_B.

    spacing="cosine" clusters samples at the ends, t_k = (1 - cos(pi k/(m-1)))/2,
    which keeps the quadrature accurate when an endpoint sits close to the boundary.
    """
    if spacing == "uniform":
        t = np.linspace(0.0, 1.0, samples)
    elif spacing == "cosine":
        t = np.sin(np.linspace(0.0, 0.5 * np.pi, samples)) ** 2
        t[0], t[-1] = 0.0, 1.0
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    pts = (1.0 - t)[:, None] * P_A.p + t[:, None] * P_B.p
    return SimplexPath(pts, t)


# -------------------
# Geodesic oracle
# -------------------
def _arc_lengths(w: np.ndarray) -> np.ndarray:
    chords = np.linalg.norm(np.diff(np.sqrt(w), axis=0), axis=1)
    return 2.0 * np.arcsin(np.minimum(chords / 2.0, 1.0))


def _polyline_length(w: np.ndarray, scale: float) -> float:
    return scale * float(np.sum(_arc_lengths(w)))


def _polyline_gradient(w: np.ndarray, scale: float) -> np.ndarray:
    """Gradient of the polyline length w.r.t. the interior waypoints, tangent to the simplex."""
    x = np.sqrt(w)
    d = np.diff(x, axis=0)
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    u = np.divide(d, norms, out=np.zeros_like(d), where=norms > 0)
    # d/dc of 2 arcsin(c/2)
    u = u / np.sqrt(np.maximum(1.0 - norms ** 2 / 4.0, 1e-300))
    gx = scale * (u[:-1] - u[1:])
    gw = gx / (2.0 * x[1:-1])
    return gw - gw.mean(axis=1, keepdims=True)


def _project(w: np.ndarray, floor: float) -> np.ndarray:
    w = np.clip(w, floor, None)
    return w / w.sum(axis=1, keepdims=True)


def geodesic_distance_oracle(P_A: ProbabilityVector, P_B: ProbabilityVector, cfg: GeometryConfig,
                             segments: int = 64, iterations: int = 5000, seed: int = 0,
                             gtol: float = 1e-9) -> float:
    """Shortest-path length between two interior points by direct minimization.

    The curve is a chain of `segments` pieces whose interior waypoints are
    moved by projected gradient descent (clip at the floor, renormalize) with a
    backtracking line search. Each piece is scored by its exact length under the
    information metric, sqrt(2 alpha) * 2 arcsin(||sqrt(P_{k+1}) - sqrt(P_k)|| / 2),
    so every iterate is the length of a real curve and never falls below the
    closed-form distance. Descent stops once the tangent gradient drops below
    `gtol * sqrt(2 alpha)` or the line search can no longer shorten the chain.
    """
    if P_A.n != P_B.n:
        raise DimensionError(f"dimension mismatch: {P_A.n} vs {P_B.n}")
    if segments < 4:
        raise GridError(f"segments must be >= 4, got {segments}")
    _require_interior(P_A.p, cfg.boundary_floor)
    _require_interior(P_B.p, cfg.boundary_floor)
    if np.array_equal(P_A.p, P_B.p):
        return 0.0

    scale = np.sqrt(2.0 * cfg.alpha)
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, segments + 1)[:, None]
    w = (1.0 - t) * P_A.p + t * P_B.p
    # start off the straight segment by a fraction of the endpoint separation
    separation = float(np.max(np.abs(P_B.p - P_A.p)))
    noise = rng.standard_normal((segments - 1, P_A.n))
    noise -= noise.mean(axis=1, keepdims=True)
    w[1:-1] = _project(w[1:-1] + 1e-5 * separation * noise, cfg.boundary_floor)

    length = _polyline_length(w, scale)
    step = 1e-2
    sigma = 1e-4
    for it in range(iterations):
        grad = _polyline_gradient(w, scale)
        if np.max(np.abs(grad)) <= gtol * scale:
            break
        accepted = False
        for _ in range(60):
            trial = w.copy()
            trial[1:-1] = _project(w[1:-1] - step * grad, cfg.boundary_floor)
            moved = float(np.sum((trial[1:-1] - w[1:-1]) ** 2))
            trial_length = _polyline_length(trial, scale)
            if moved > 0 and trial_length <= length - sigma * moved / step:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if it == 0:
                raise ConvergenceError("length did not decrease from the initial path", length, it)
            break
        if trial_length > length:
            raise ConvergenceError("length increased after projection", trial_length, it)
        w, length = trial, trial_length
        step *= 2.0
    return length
