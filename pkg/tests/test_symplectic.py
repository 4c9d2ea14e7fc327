# tests/test_symplectic.py
import numpy as np
import pytest

from qgeokit.dynamics import QuadraticHamiltonian, hamiltonian_observable, wave_observable
from qgeokit.errors import BoundaryError
from qgeokit.sampling import random_hermitian, random_phase_point
from qgeokit.simplex import ProbabilityVector
from qgeokit.symplectic import (ObservableFunction, PhasePoint, RealPhaseCoordinates, canonical_residuals,
                                from_xy, observable_gauge_check, phase_gradient, poisson_bracket,
                                poisson_bracket_geometric, product, shift_derivative_sum, symplectic_form,
                                to_xy, xy_observables)


def coordinate(block, i):
    if block == "P":
        return ObservableFunction(lambda p, s: p[i], name=f"P{i}")
    return ObservableFunction(lambda p, s: s[i], name=f"S{i}")


def test_symplectic_form_n1():
    np.testing.assert_array_equal(symplectic_form(1), [[0.0, 1.0], [-1.0, 0.0]])


@pytest.mark.parametrize("n", [1, 2, 5])
def test_symplectic_form_structure(n):
    omega = symplectic_form(n)
    np.testing.assert_array_equal(omega.T, -omega)
    np.testing.assert_array_equal(omega @ omega, -np.eye(2 * n))


def test_canonical_pair_brackets(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    pt = random_phase_point(3, rng, cfg)
    assert poisson_bracket(coordinate("P", 0), coordinate("S", 0), pt, cfg) == pytest.approx(1.0, abs=1e-8)
    assert poisson_bracket(coordinate("P", 0), coordinate("P", 1), pt, cfg) == pytest.approx(0.0, abs=1e-12)
    assert poisson_bracket(coordinate("P", 0), coordinate("S", 1), pt, cfg) == pytest.approx(0.0, abs=1e-8)


def test_wave_bracket(cfg_factory, rng):
    cfg = cfg_factory(n=2, alpha=0.5)
    pt = random_phase_point(2, rng, cfg)
    br = poisson_bracket(wave_observable(0, cfg), wave_observable(0, cfg, conjugate=True), pt, cfg)
    assert abs(br - (-2j)) < 1e-6


def test_bracket_antisymmetry_is_exact(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    pt = random_phase_point(3, rng, cfg)
    F = ObservableFunction(lambda p, s: p[0] * np.cos(s[1] / cfg.alpha) + p[2] ** 2)
    G = ObservableFunction(lambda p, s: np.sin(s[0]) * p[1])
    assert poisson_bracket(F, G, pt, cfg) == -poisson_bracket(G, F, pt, cfg)


def test_leibniz_rule(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    F = ObservableFunction(lambda p, s: p[0] * np.cos(s[1] / cfg.alpha), name="F")
    G = ObservableFunction(lambda p, s: p[1] ** 2 + s[2], name="G")
    H = ObservableFunction(lambda p, s: np.sin(s[0]) * p[2], name="H")
    for _ in range(5):
        pt = random_phase_point(3, rng, cfg)
        lhs = poisson_bracket(product(F, G), H, pt, cfg)
        rhs = F.at(pt) * poisson_bracket(G, H, pt, cfg) + poisson_bracket(F, H, pt, cfg) * G.at(pt)
        assert lhs == pytest.approx(rhs, abs=1e-6)


def test_geometric_bracket_agrees(cfg_factory, rng):
    cfg = cfg_factory(n=4)
    F = ObservableFunction(lambda p, s: np.sum(p * np.cos(s)))
    G = ObservableFunction(lambda p, s: np.sum(p ** 2 * s))
    pt = random_phase_point(4, rng, cfg)
    assert poisson_bracket_geometric(F, G, pt, cfg) == pytest.approx(poisson_bracket(F, G, pt, cfg), abs=1e-12)


def test_analytic_gradient_matches_finite_differences(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    pt = random_phase_point(3, rng, cfg)
    xs, ys = xy_observables(3, cfg, analytic=True)
    xs_fd, ys_fd = xy_observables(3, cfg, analytic=False)
    for a, b in zip(xs + ys, xs_fd + ys_fd):
        np.testing.assert_allclose(phase_gradient(a, pt, cfg), phase_gradient(b, pt, cfg), rtol=1e-6, atol=1e-8)


def test_finite_differences_refuse_the_boundary(cfg):
    pt = PhasePoint(ProbabilityVector([1.0, 0.0]), np.zeros(2))
    with pytest.raises(BoundaryError):
        poisson_bracket(coordinate("P", 0), coordinate("S", 1), pt, cfg)


def test_gauge_check_counterexample(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    points = [random_phase_point(3, rng, cfg) for _ in range(4)]
    A = ObservableFunction(lambda p, s: np.sum(s * p))
    report = observable_gauge_check(A, points, [0.1, 0.5], cfg)
    assert report.max_shift_variation == pytest.approx(0.5, rel=1e-9)
    assert not report.shift_invariant
    assert not report.passed


def test_gauge_check_probability_only_observable(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    points = [random_phase_point(3, rng, cfg) for _ in range(4)]
    A = ObservableFunction(lambda p, s: np.sum(p ** 2))
    report = observable_gauge_check(A, points, [0.1, -2.0, 7.0], cfg)
    assert report.passed


def test_gauge_check_hermitian_hamiltonian(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    H = QuadraticHamiltonian(random_hermitian(3, rng))
    points = [random_phase_point(3, rng, cfg) for _ in range(4)]
    report = observable_gauge_check(hamiltonian_observable(H, cfg), points, [0.3, 1.1, -2.4], cfg)
    assert report.shift_invariant


def test_shift_derivative_sum_vanishes_for_hermitian_hamiltonian(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    H = QuadraticHamiltonian(random_hermitian(3, rng))
    total, shifted = shift_derivative_sum(hamiltonian_observable(H, cfg), random_phase_point(3, rng, cfg), cfg)
    assert abs(total) < 1e-6
    assert abs(shifted) < 1e-6


def test_to_xy_examples(cfg):
    xy = to_xy(PhasePoint(ProbabilityVector([0.5, 0.5]), np.zeros(2)), cfg)
    np.testing.assert_allclose(xy.x, [np.sqrt(0.5)] * 2, rtol=1e-15)
    np.testing.assert_array_equal(xy.y, [0.0, 0.0])
    assert xy.radius_squared() == pytest.approx(2 * cfg.alpha, abs=1e-10)

    quarter = np.pi * cfg.alpha / 2
    xy = to_xy(PhasePoint(ProbabilityVector([0.25, 0.75]), np.array([quarter, 0.0])), cfg)
    assert xy.x[0] == pytest.approx(0.0, abs=1e-15)
    assert xy.y[0] == pytest.approx(np.sqrt(2 * cfg.alpha * 0.25), rel=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_xy_roundtrip_and_constraint(cfg_factory, rng, alpha):
    cfg = cfg_factory(n=4, alpha=alpha)
    for _ in range(10):
        pt = random_phase_point(4, rng, cfg)
        xy = to_xy(pt, cfg)
        assert xy.radius_squared() == pytest.approx(2 * alpha, abs=1e-10)
        back = from_xy(xy, cfg)
        np.testing.assert_allclose(back.p.p, pt.p.p, atol=1e-12)
        np.testing.assert_allclose(back.s, pt.s, atol=1e-12)


def test_from_xy_principal_branch(cfg):
    back = from_xy(RealPhaseCoordinates([-1.0, 0.0], [0.0, 0.0]), cfg)
    assert back.s[0] == pytest.approx(np.pi * cfg.alpha)
    assert back.s[1] == 0.0


def test_canonical_residuals_finite_differences(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    points = [random_phase_point(3, rng, cfg) for _ in range(5)]
    assert canonical_residuals(points, cfg) < 1e-6


def test_canonical_residuals_analytic_single_state(cfg):
    pt = PhasePoint(ProbabilityVector([1.0]), np.array([0.3]))
    assert canonical_residuals([pt], cfg, analytic=True) < 1e-12


def test_canonical_residuals_detect_scaled_chart(cfg_factory, rng):
    cfg = cfg_factory(n=2)
    xs, ys = xy_observables(2, cfg, analytic=False)
    doubled = [ObservableFunction(lambda p, s, f=f: 2.0 * f(p, s)) for f in xs]
    residual = canonical_residuals([random_phase_point(2, rng, cfg)], cfg, chart=(doubled, ys))
    assert residual > 0.99
