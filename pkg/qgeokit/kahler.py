# qgeokit/kahler.py
# Kahler geometry of (P, S): the general compatible family, the flat triple,
# residuals of the three Kahler conditions, curvature by finite differences,
# the spherical-symmetry argument, and the complex-coordinate form.
import warnings
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from qgeokit.config import GeometryConfig
from qgeokit.errors import (AdmissibilityError, BoundaryError, ConditioningWarning, DimensionError,
                            SingularMetricError)
from qgeokit.simplex import ProbabilityVector, information_metric
from qgeokit.symplectic import PhasePoint, _ps_to_xy, symplectic_form

ADMISSIBILITY_TOL = 1e-10
CONDITION_LIMIT = 1e8

MetricField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExtensionMatrix:
    """The free block A of the compatible family; admissible at P iff G A G^-1 = A^T."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"extension block must be square, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    def admissibility_residual(self, G: np.ndarray) -> float:
        g_diag = np.diag(G)
        # G A G^-1 for diagonal G, entrywise
        conj = self.a * g_diag[:, None] / g_diag[None, :]
        return float(np.max(np.abs(conj - self.a.T)))


@dataclass(frozen=True)
class KahlerTriple:
    """(Omega, g, J) at a point. `basis` names the coordinates: "PS", "psi" or "xy"."""

    omega: np.ndarray
    g: np.ndarray
    j: np.ndarray
    basis: str = "PS"

    @property
    def dim(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class SphericalMetricSpec:
    """Rotation-invariant line element f(r) sum(dx^2 + dy^2) + g(r) (sum x dx + y dy)^2."""

    f: Callable[[float], float]
    g_rad: Callable[[float], float]


def kahler_residuals(t: KahlerTriple) -> Tuple[float, float, float]:
    """Max-norm residuals of Omega = g J, J^T g J = g, J^2 = -1."""
    shapes = {t.omega.shape, t.g.shape, t.j.shape}
    if len(shapes) != 1 or t.g.ndim != 2 or t.g.shape[0] != t.g.shape[1]:
        raise DimensionError(f"inconsistent tensor shapes: {sorted(shapes)}")
    eye = np.eye(t.dim)
    compat = np.max(np.abs(t.omega - t.g @ t.j))
    hermit = np.max(np.abs(t.j.T @ t.g @ t.j - t.g))
    cplx = np.max(np.abs(t.j @ t.j + eye))
    return float(compat), float(hermit), float(cplx)


def is_positive_definite(g: np.ndarray) -> bool:
    return bool(np.min(np.linalg.eigvalsh(0.5 * (g + g.T))) > 0)


def build_kahler_family(P: ProbabilityVector, A: ExtensionMatrix, cfg: GeometryConfig) -> KahlerTriple:
    """g = [[G, A^T], [A, (1 + A^2) G^-1]], J = [[A, (1 + A^2) G^-1], [-G, -G A G^-1]]."""
    G = information_metric(P, cfg)
    if A.a.shape != G.shape:
        raise DimensionError(f"A has shape {A.a.shape}, G has shape {G.shape}")
    residual = A.admissibility_residual(G)
    if residual > ADMISSIBILITY_TOL:
        raise AdmissibilityError(f"G A G^-1 differs from A^T by {residual:.3g}", residual)
    n = P.n
    a = A.a
    g_inv = np.diag(1.0 / np.diag(G))
    lower = (np.eye(n) + a @ a) @ g_inv
    # symmetric in exact arithmetic under admissibility; symmetrize the rounding
    lower_sym = 0.5 * (lower + lower.T)
    g = np.block([[G, a.T], [a, lower_sym]])
    j = np.block([[a, lower], [-G, -G @ a @ g_inv]])
    return KahlerTriple(symplectic_form(n), g, j)


def random_admissible_extension(P: ProbabilityVector, cfg: GeometryConfig, seed: int,
                                scale: float) -> ExtensionMatrix:
    """A = G^(-1/2) S G^(1/2) with S random symmetric of spectral norm `scale`."""
    n = P.n
    if scale == 0:
        return ExtensionMatrix(np.zeros((n, n)))
    rng = np.random.default_rng(seed)
    s = rng.standard_normal((n, n))
    s = 0.5 * (s + s.T)
    s *= scale / np.linalg.norm(s, 2)
    root = np.sqrt(np.diag(information_metric(P, cfg)))
    return ExtensionMatrix(s * root[None, :] / root[:, None])


def flat_triple(P: ProbabilityVector, cfg: GeometryConfig) -> KahlerTriple:
    """The A = 0 member: g = diag(G, G^-1), J = [[0, G^-1], [-G, 0]]."""
    G = information_metric(P, cfg)
    g_inv = np.diag(2.0 * P.p / cfg.alpha)
    zero = np.zeros_like(G)
    g = np.block([[G, zero], [zero, g_inv]])
    j = np.block([[zero, g_inv], [-G, zero]])
    return KahlerTriple(symplectic_form(P.n), g, j)


def extension_block_norm(t: KahlerTriple) -> float:
    """Max-norm of the mixed dP-dS block of the metric."""
    n = t.dim // 2
    return float(np.max(np.abs(t.g[:n, n:])))


def xy_jacobian(pt: PhasePoint, cfg: GeometryConfig) -> np.ndarray:
    """d(x, y) / d(P, S) of the canonical chart at pt."""
    p, theta = pt.p.p, pt.s / cfg.alpha
    r = np.sqrt(2.0 * cfg.alpha * p)
    c, s = np.cos(theta), np.sin(theta)
    return np.block([
        [np.diag(cfg.alpha * c / r), np.diag(-r * s / cfg.alpha)],
        [np.diag(cfg.alpha * s / r), np.diag(r * c / cfg.alpha)],
    ])


def spherical_line_element(spec: SphericalMetricSpec, pt: PhasePoint,
                           cfg: GeometryConfig) -> Tuple[np.ndarray, float]:
    """The rotation-invariant metric pulled back to (P, S), and the norm of its mixed block.

    The line element is assembled in the (x, y) chart as f(r) I + g(r) v v^T with
    v = (x, y) and r = |v|, then pulled back through the analytic chart Jacobian.
    """
    p = pt.p.p
    if np.any(p < cfg.boundary_floor):
        i = int(np.argmin(p))
        raise BoundaryError(f"P^{i} = {p[i]:.3g} is below the boundary floor", index=i, value=float(p[i]))
    x, y = _ps_to_xy(p, pt.s, cfg.alpha)
    v = np.concatenate([x, y])
    r = float(np.linalg.norm(v))
    f, g_r = float(spec.f(r)), float(spec.g_rad(r))
    if not f > 0:
        raise ValueError(f"f(r) must be positive on the constraint sphere, got {f}")
    ambient = f * np.eye(v.size) + g_r * np.outer(v, v)
    jac = xy_jacobian(pt, cfg)
    metric = jac.T @ ambient @ jac
    n = pt.n
    return metric, float(np.max(np.abs(metric[:n, n:])))


# -------------------
# Curvature engine
# -------------------
def flat_metric_field(cfg: GeometryConfig) -> MetricField:
    """The A = 0 extended metric as a field over the (P, S) chart of R^{2n}."""
    def field(c: np.ndarray) -> np.ndarray:
        n = c.size // 2
        p = c[:n]
        if np.any(p < cfg.boundary_floor):
            i = int(np.argmin(p))
            raise BoundaryError(f"stencil reached P^{i} = {p[i]:.3g}", index=i, value=float(p[i]))
        return np.diag(np.concatenate([cfg.alpha / (2.0 * p), 2.0 * p / cfg.alpha]))
    return field


def sphere_metric_field(radius: float) -> MetricField:
    """Round 2-sphere of the given radius in (theta, phi)."""
    def field(c: np.ndarray) -> np.ndarray:
        theta = c[0]
        return radius ** 2 * np.diag([1.0, np.sin(theta) ** 2])
    return field


def _checked(metric_field: MetricField, c: np.ndarray) -> np.ndarray:
    g = np.asarray(metric_field(c), dtype=float)
    try:
        np.linalg.cholesky(0.5 * (g + g.T))
    except np.linalg.LinAlgError as e:
        raise SingularMetricError(f"metric is not positive-definite at {c}") from e
    return g


def _derivative(func: Callable[[np.ndarray], np.ndarray], c: np.ndarray, k: int, h: float,
                order: int) -> np.ndarray:
    e = np.zeros_like(c)
    e[k] = h
    if order == 2:
        return (func(c + e) - func(c - e)) / (2.0 * h)
    return (-func(c + 2 * e) + 8.0 * func(c + e) - 8.0 * func(c - e) + func(c - 2 * e)) / (12.0 * h)


def _christoffel(metric_field: MetricField, c: np.ndarray, h: float, order: int) -> np.ndarray:
    """Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)."""
    g = _checked(metric_field, c)
    g_inv = np.linalg.inv(g)
    dg = np.stack([_derivative(lambda x: _checked(metric_field, x), c, k, h, order) for k in range(c.size)])
    term = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    return 0.5 * np.einsum("ad,dbc->abc", g_inv, term)


def _center_coords(center: Union[PhasePoint, np.ndarray]) -> np.ndarray:
    if isinstance(center, PhasePoint):
        return center.coords
    return np.asarray(center, dtype=float)


def riemann_tensor(metric_field: MetricField, center: Union[PhasePoint, np.ndarray],
                   cfg: GeometryConfig) -> np.ndarray:
    """R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}."""
    c = _center_coords(center)
    h, order = cfg.curvature_step, cfg.curvature_order
    gamma = _christoffel(metric_field, c, h, order)
    d_gamma = np.stack([
        _derivative(lambda x: _christoffel(metric_field, x, h, order), c, k, h, order)
        for k in range(c.size)
    ])
    return (np.einsum("cadb->abcd", d_gamma) - np.einsum("dacb->abcd", d_gamma)
            + np.einsum("ace,edb->abcd", gamma, gamma) - np.einsum("ade,ecb->abcd", gamma, gamma))


def riemann_curvature(metric_field: MetricField, center: Union[PhasePoint, np.ndarray],
                      cfg: GeometryConfig) -> float:
    """Max-norm of the Riemann tensor at center."""
    return float(np.max(np.abs(riemann_tensor(metric_field, center, cfg))))


def sectional_curvature(metric_field: MetricField, center: Union[PhasePoint, np.ndarray],
                        cfg: GeometryConfig, plane: Tuple[int, int] = (0, 1)) -> float:
    a, b = plane
    c = _center_coords(center)
    g = _checked(metric_field, c)
    lowered = np.einsum("ae,ebcd->abcd", g, riemann_tensor(metric_field, c, cfg))
    return float(lowered[a, b, a, b] / (g[a, a] * g[b, b] - g[a, b] ** 2))


# -------------------
# Complex coordinates
# -------------------
def complex_coordinate_triple(cfg: GeometryConfig, n: int) -> KahlerTriple:
    """Constant tensors in the (psi^1..psi^n, conj psi^1..conj psi^n) basis."""
    if n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    a = cfg.alpha
    omega = np.block([[zero, 1j * a * eye], [-1j * a * eye, zero]])
    g = np.block([[zero, a * eye], [a * eye, zero]])
    j = np.block([[-1j * eye, zero], [zero, 1j * eye]])
    return KahlerTriple(omega, g, j, basis="psi")


def realify(t: KahlerTriple) -> KahlerTriple:
    """Rewrite a psi-basis triple in the real coordinates (Re psi, Im psi)."""
    if t.basis != "psi":
        raise ValueError(f"realify expects a psi-basis triple, got {t.basis!r}")
    n = t.dim // 2
    eye = np.eye(n)
    # d(psi, conj psi) = T d(Re psi, Im psi)
    T = np.block([[eye, 1j * eye], [eye, -1j * eye]])
    g = T.T @ t.g @ T
    omega = T.T @ t.omega @ T
    j = np.linalg.solve(T, t.j @ T)
    return KahlerTriple(np.real(omega), np.real(g), np.real(j), basis="xy")


def madelung_jacobian(pt: PhasePoint, cfg: GeometryConfig) -> np.ndarray:
    """d(psi, conj psi) / d(P, S) at pt."""
    p, s = pt.p.p, pt.s
    if np.any(p <= 0):
        i = int(np.argmin(p))
        raise BoundaryError(f"Madelung Jacobian is singular at P^{i} = 0", index=i, value=0.0)
    psi = np.sqrt(p) * np.exp(1j * s / cfg.alpha)
    d_p = np.diag(psi / (2.0 * p))
    d_s = np.diag(1j * psi / cfg.alpha)
    return np.block([[d_p, d_s], [np.conj(d_p), np.conj(d_s)]])


def pullback_check(pt: PhasePoint, cfg: GeometryConfig) -> float:
    """Pull the psi-basis tensors back to (P, S) and compare with the flat triple.

    Warns with ConditioningWarning when the Jacobian is near-singular.
    """
    flat = flat_triple(pt.p, cfg)
    jac = madelung_jacobian(pt, cfg)
    cond = np.linalg.cond(jac)
    if cond > CONDITION_LIMIT:
        warnings.warn(f"Madelung Jacobian condition number {cond:.3g} at the boundary", ConditioningWarning,
                      stacklevel=2)
    cc = complex_coordinate_triple(cfg, pt.n)
    g = jac.T @ cc.g @ jac
    omega = jac.T @ cc.omega @ jac
    j = np.linalg.solve(jac, cc.j @ jac)
    return float(max(np.max(np.abs(g - flat.g)), np.max(np.abs(omega - flat.omega)),
                     np.max(np.abs(j - flat.j))))
