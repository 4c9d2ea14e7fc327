# qgeokit/symplectic.py
# Phase space (P, S): Poisson brackets, the symplectic form, admissibility of
# observables and the canonical (x, y) chart.
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from qgeokit.config import GeometryConfig
from qgeokit.errors import BoundaryError, DimensionError
from qgeokit.simplex import ProbabilityVector, _frozen

# observables take raw coordinate arrays so that finite-difference stencils may
# step off the normalization constraint
ScalarField = Callable[[np.ndarray, np.ndarray], complex]
GradientField = Callable[[np.ndarray, np.ndarray], np.ndarray]

ADMISSIBLE_TOL = 1e-8


@dataclass(frozen=True)
class PhasePoint:
    """Canonical pair (P, S); S carries the units of alpha."""

    p: ProbabilityVector
    s: np.ndarray

    def __post_init__(self):
        p = self.p if isinstance(self.p, ProbabilityVector) else ProbabilityVector(self.p)
        s = _frozen(self.s)
        if s.shape != p.p.shape:
            raise DimensionError(f"S has shape {s.shape}, P has shape {p.p.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("S must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return self.p.n

    @property
    def coords(self) -> np.ndarray:
        """The 2n-vector (P^1..P^n, S^1..S^n)."""
        return np.concatenate([self.p.p, self.s])


@dataclass(frozen=True)
class ObservableFunction:
    """A (possibly complex) function A(P, S) with an optional analytic gradient.

    `gradient` returns the 2n-vector (dA/dP, dA/dS).
    """

    value: ScalarField
    gradient: Optional[GradientField] = None
    name: str = "A"

    def __call__(self, p: np.ndarray, s: np.ndarray):
        return self.value(p, s)

    def at(self, pt: PhasePoint):
        return self.value(pt.p.p, pt.s)


@dataclass(frozen=True)
class RealPhaseCoordinates:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x, y = _frozen(self.x), _frozen(self.y)
        if x.shape != y.shape:
            raise DimensionError(f"x has shape {x.shape}, y has shape {y.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def radius_squared(self) -> float:
        return float(np.sum(self.x ** 2 + self.y ** 2))


@dataclass(frozen=True)
class GaugeReport:
    max_shift_variation: float
    max_boundary_derivative: float
    tolerance: float = ADMISSIBLE_TOL

    @property
    def shift_invariant(self) -> bool:
        return self.max_shift_variation < self.tolerance

    @property
    def boundary_regular(self) -> bool:
        return self.max_boundary_derivative < self.tolerance

    @property
    def passed(self) -> bool:
        return self.shift_invariant and self.boundary_regular


def symplectic_form(n: int) -> np.ndarray:
    """Omega = [[0, 1], [-1, 0]] in n x n blocks."""
    if n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _steps(c: np.ndarray, cfg: GeometryConfig) -> np.ndarray:
    return cfg.fd_step * np.maximum(1.0, np.abs(c))


def phase_gradient(F: ObservableFunction, pt: PhasePoint, cfg: GeometryConfig,
                   s_only: bool = False) -> np.ndarray:
    """(dF/dP, dF/dS) at pt: analytic when F carries a gradient, else centered differences.

    With s_only=True the P block is left at zero and the P coordinates are never
    perturbed, which keeps the stencil valid right at the boundary floor.
    """
    p, s = pt.p.p, pt.s
    if F.gradient is not None:
        g = np.asarray(F.gradient(p, s))
        if g.shape != (2 * pt.n,):
            raise DimensionError(f"gradient of {F.name} has shape {g.shape}, expected ({2 * pt.n},)")
        return g
    n = pt.n
    hp, hs = _steps(p, cfg), _steps(s, cfg)
    if not s_only:
        low = np.flatnonzero(p - hp < cfg.boundary_floor)
        if low.size:
            i = int(low[0])
            raise BoundaryError(
                f"P^{i} = {p[i]:.3g} is too close to the boundary for a finite-difference step",
                index=i, value=float(p[i]),
            )
    centre = F.value(p, s)
    grad = np.zeros(2 * n, dtype=np.result_type(centre, float))
    for i in range(n):
        if not s_only:
            e = np.zeros(n)
            e[i] = hp[i]
            grad[i] = (F.value(p + e, s) - F.value(p - e, s)) / (2.0 * hp[i])
        e = np.zeros(n)
        e[i] = hs[i]
        grad[n + i] = (F.value(p, s + e) - F.value(p, s - e)) / (2.0 * hs[i])
    return grad


def _bracket_from_gradients(gf: np.ndarray, gg: np.ndarray):
    n = gf.size // 2
    return np.sum(gf[:n] * gg[n:] - gf[n:] * gg[:n])


def poisson_bracket(F: ObservableFunction, G: ObservableFunction, pt: PhasePoint, cfg: GeometryConfig):
    """{F, G} = sum_i (dF/dP^i dG/dS^i - dF/dS^i dG/dP^i)."""
    result = _bracket_from_gradients(phase_gradient(F, pt, cfg), phase_gradient(G, pt, cfg))
    return _real_if_real(result)


def poisson_bracket_geometric(F: ObservableFunction, G: ObservableFunction, pt: PhasePoint,
                              cfg: GeometryConfig):
    """The same bracket written as (grad F)^T Omega (grad G)."""
    gf, gg = phase_gradient(F, pt, cfg), phase_gradient(G, pt, cfg)
    return _real_if_real(gf @ symplectic_form(pt.n) @ gg)


def _real_if_real(z):
    if np.iscomplexobj(z):
        return complex(z)
    return float(z)


def product(F: ObservableFunction, G: ObservableFunction) -> ObservableFunction:
    """Pointwise product, with the product-rule gradient when both factors have one."""
    grad = None
    if F.gradient is not None and G.gradient is not None:
        def grad(p, s):
            return F.gradient(p, s) * G.value(p, s) + F.value(p, s) * G.gradient(p, s)
    return ObservableFunction(lambda p, s: F.value(p, s) * G.value(p, s), grad, f"{F.name}*{G.name}")


def _at_floor(pt: PhasePoint, i: int, floor: float) -> PhasePoint:
    """Move P^i to the floor, spreading the removed mass proportionally over the rest."""
    p = pt.p.p.copy()
    rest = 1.0 - p[i]
    p[i] = floor
    others = np.arange(p.size) != i
    p[others] = p[others] * (1.0 - floor) / rest if rest > 0 else (1.0 - floor) / (p.size - 1)
    return PhasePoint(ProbabilityVector(p), pt.s)


def observable_gauge_check(A: ObservableFunction, points: Sequence[PhasePoint], shifts: Sequence[float],
                           cfg: GeometryConfig) -> GaugeReport:
    """Test A(P, S + c) = A(P, S) and dA/dS^i -> 0 as P^i -> 0."""
    if not points:
        raise ValueError("observable_gauge_check needs at least one point")
    variation = 0.0
    for pt in points:
        base = A.at(pt)
        for c in shifts:
            variation = max(variation, float(abs(A.value(pt.p.p, pt.s + c) - base)))
    boundary = 0.0
    for pt in points:
        for i in range(pt.n):
            edge = _at_floor(pt, i, cfg.boundary_floor)
            g = phase_gradient(A, edge, cfg, s_only=True)
            boundary = max(boundary, float(abs(g[pt.n + i])))
    return GaugeReport(variation, boundary)


def shift_derivative_sum(A: ObservableFunction, pt: PhasePoint, cfg: GeometryConfig,
                         eps: float = 1e-6) -> Tuple[float, float]:
    """(sum_i dA/dS^i, (A(P, S + eps) - A(P, S)) / eps): the first-order form of gauge invariance."""
    g = phase_gradient(A, pt, cfg, s_only=True)
    total = float(np.real(np.sum(g[pt.n:])))
    shifted = float(np.real(A.value(pt.p.p, pt.s + eps) - A.at(pt))) / eps
    return total, shifted


# -------------------
# Canonical (x, y) chart
# -------------------
def _ps_to_xy(p: np.ndarray, s: np.ndarray, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    r = np.sqrt(2.0 * alpha * p)
    return r * np.cos(s / alpha), r * np.sin(s / alpha)


def _xy_to_ps(x: np.ndarray, y: np.ndarray, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    p = (x ** 2 + y ** 2) / (2.0 * alpha)
    theta = np.arctan2(y, x)
    # principal branch (-pi, pi]; atan2 may return -pi on the negative axis
    theta = np.where(theta <= -np.pi, np.pi, theta)
    theta = np.where(p == 0.0, 0.0, theta)
    return p, alpha * theta


def to_xy(pt: PhasePoint, cfg: GeometryConfig) -> RealPhaseCoordinates:
    """x^i = sqrt(2 alpha P^i) cos(S^i/alpha), y^i = sqrt(2 alpha P^i) sin(S^i/alpha)."""
    x, y = _ps_to_xy(pt.p.p, pt.s, cfg.alpha)
    return RealPhaseCoordinates(x, y)


def from_xy(xy: RealPhaseCoordinates, cfg: GeometryConfig) -> PhasePoint:
    """Inverse of to_xy with S^i/alpha on the principal branch (-pi, pi]."""
    p, s = _xy_to_ps(xy.x, xy.y, cfg.alpha)
    return PhasePoint(ProbabilityVector(p), s)


def xy_observables(n: int, cfg: GeometryConfig,
                   analytic: bool = True) -> Tuple[List[ObservableFunction], List[ObservableFunction]]:
    """The chart functions x^i(P, S), y^i(P, S) as observables."""
    a = cfg.alpha
    xs, ys = [], []
    for i in range(n):
        def x_val(p, s, i=i):
            return np.sqrt(2.0 * a * p[i]) * np.cos(s[i] / a)

        def y_val(p, s, i=i):
            return np.sqrt(2.0 * a * p[i]) * np.sin(s[i] / a)

        def x_grad(p, s, i=i):
            g = np.zeros(2 * n)
            g[i] = np.sqrt(a / (2.0 * p[i])) * np.cos(s[i] / a)
            g[n + i] = -np.sqrt(2.0 * a * p[i]) * np.sin(s[i] / a) / a
            return g

        def y_grad(p, s, i=i):
            g = np.zeros(2 * n)
            g[i] = np.sqrt(a / (2.0 * p[i])) * np.sin(s[i] / a)
            g[n + i] = np.sqrt(2.0 * a * p[i]) * np.cos(s[i] / a) / a
            return g

        xs.append(ObservableFunction(x_val, x_grad if analytic else None, f"x{i}"))
        ys.append(ObservableFunction(y_val, y_grad if analytic else None, f"y{i}"))
    return xs, ys


def canonical_residuals(points: Sequence[PhasePoint], cfg: GeometryConfig, analytic: bool = False,
                        chart: Optional[Tuple[List[ObservableFunction], List[ObservableFunction]]] = None) -> float:
    """max |{x^i, y^j} - delta_ij|, |{x^i, x^j}|, |{y^i, y^j}| over the points.

    `chart` replaces the (x, y) observables, e.g. to feed a deliberately broken transform.
    """
    worst = 0.0
    for pt in points:
        xs, ys = chart if chart is not None else xy_observables(pt.n, cfg, analytic)
        gx = [phase_gradient(f, pt, cfg) for f in xs]
        gy = [phase_gradient(f, pt, cfg) for f in ys]
        for i in range(pt.n):
            for j in range(pt.n):
                delta = 1.0 if i == j else 0.0
                worst = max(
                    worst,
                    abs(_bracket_from_gradients(gx[i], gy[j]) - delta),
                    abs(_bracket_from_gradients(gx[i], gx[j])),
                    abs(_bracket_from_gradients(gy[i], gy[j])),
                )
    return float(worst)
