# tests/test_quantum.py
import numpy as np
import pytest

from qgeokit.errors import DimensionError
from qgeokit.quantum import (WavePath, WaveVector, complex_curve_length, dirac_product, global_phase,
                             great_circle_path, inverse_madelung, madelung, normalize,
                             quantum_statistical_distance)
from qgeokit.sampling import random_interior, random_phase_point, random_wave
from qgeokit.simplex import ProbabilityVector, statistical_distance
from qgeokit.symplectic import PhasePoint

E1 = WaveVector([1.0, 0.0])
E2 = WaveVector([0.0, 1.0])


def test_madelung_examples(cfg):
    psi = madelung(PhasePoint(ProbabilityVector([0.25, 0.75]), np.zeros(2)), cfg)
    np.testing.assert_allclose(psi.psi, [0.5, np.sqrt(0.75)], rtol=1e-15)
    psi = madelung(PhasePoint(ProbabilityVector([1.0, 0.0]), np.array([np.pi * cfg.alpha, 0.0])), cfg)
    np.testing.assert_allclose(psi.psi, [-1.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_madelung_roundtrip(cfg_factory, rng, alpha):
    cfg = cfg_factory(n=4, alpha=alpha)
    for _ in range(10):
        pt = random_phase_point(4, rng, cfg)
        back = inverse_madelung(madelung(pt, cfg), cfg)
        np.testing.assert_allclose(back.p.p, pt.p.p, atol=1e-14)
        np.testing.assert_allclose(back.s, pt.s, atol=1e-12)


def test_inverse_madelung_zero_amplitude(cfg):
    pt = inverse_madelung(WaveVector([0.0, 1j]), cfg)
    assert pt.s[0] == 0.0
    assert pt.s[1] == pytest.approx(np.pi * cfg.alpha / 2)


def test_inverse_madelung_needs_normalized_state(cfg):
    with pytest.raises(ValueError):
        inverse_madelung(WaveVector([1.0, 1.0]), cfg)


def test_dirac_product_examples(cfg):
    assert dirac_product(E1, E1, cfg) == 1.0
    assert dirac_product(E1, E2, cfg) == 0.0
    plus = WaveVector([1 / np.sqrt(2), 1 / np.sqrt(2)])
    minus_i = WaveVector([1 / np.sqrt(2), -1j / np.sqrt(2)])
    assert dirac_product(plus, minus_i, cfg) == pytest.approx(0.5 - 0.5j, abs=1e-15)


def test_dirac_product_properties(cfg_factory, rng):
    cfg = cfg_factory(n=5, alpha=2.0)
    for _ in range(10):
        a, b = random_wave(5, rng), random_wave(5, rng)
        assert dirac_product(a, b, cfg) == pytest.approx(np.conj(dirac_product(b, a, cfg)), abs=1e-15)
        assert dirac_product(a, a, cfg).real == pytest.approx(1.0, abs=1e-14)


def test_dirac_product_dimension_mismatch(cfg):
    with pytest.raises(DimensionError):
        dirac_product(E1, WaveVector([1.0, 0.0, 0.0]), cfg)


def test_normalize_and_global_phase():
    psi = normalize(WaveVector([3.0, 4.0j]))
    np.testing.assert_allclose(psi.psi, [0.6, 0.8j], rtol=1e-15)
    assert global_phase(psi, 0.7).is_normalized()


@pytest.mark.parametrize("a, b, expected", [
    ([1.0, 0.0], [0.0, 1.0], np.pi / 2),
    ([1.0, 0.0], [1j, 0.0], 0.0),
    ([1 / np.sqrt(2), 1 / np.sqrt(2)], [1.0, 0.0], np.pi / 4),
])
def test_quantum_distance_examples(cfg, a, b, expected):
    d = quantum_statistical_distance(WaveVector(a), WaveVector(b), cfg)
    assert d == pytest.approx(expected, abs=1e-14)


def test_quantum_distance_ignores_global_phase(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    for chi in (0.3, 2.0, -5.1):
        a, b = random_wave(3, rng), random_wave(3, rng)
        d = quantum_statistical_distance(a, b, cfg)
        assert quantum_statistical_distance(global_phase(a, chi), b, cfg) == pytest.approx(d, abs=1e-14)
        assert quantum_statistical_distance(a, global_phase(a, chi), cfg) == pytest.approx(0.0, abs=1e-14)


def test_quantum_distance_reduces_to_classical(cfg_factory, rng):
    cfg = cfg_factory(n=4)
    for _ in range(20):
        A, B = random_interior(4, rng), random_interior(4, rng)
        psi_A = madelung(PhasePoint(A, np.zeros(4)), cfg)
        psi_B = madelung(PhasePoint(B, np.zeros(4)), cfg)
        assert quantum_statistical_distance(psi_A, psi_B, cfg) == pytest.approx(
            statistical_distance(A, B, cfg), abs=1e-12)


def test_quantum_distance_bounded_by_classical(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    for _ in range(20):
        a, b = random_wave(3, rng), random_wave(3, rng)
        A = ProbabilityVector(np.abs(a.psi) ** 2)
        B = ProbabilityVector(np.abs(b.psi) ** 2)
        assert quantum_statistical_distance(a, b, cfg) <= statistical_distance(A, B, cfg) + 1e-12


def test_quantum_distance_triangle_inequality(cfg_factory, rng):
    cfg = cfg_factory(n=3, alpha=1.0)
    for _ in range(50):
        a, b, c = random_wave(3, rng), random_wave(3, rng), random_wave(3, rng)
        ac = quantum_statistical_distance(a, c, cfg)
        assert ac <= quantum_statistical_distance(a, b, cfg) + quantum_statistical_distance(b, c, cfg) + 1e-12


def test_quantum_distance_separates_distinct_rays(cfg):
    eps = 1e-6
    tilted = WaveVector([np.cos(eps), np.sin(eps)])
    assert quantum_statistical_distance(E1, tilted, cfg) == pytest.approx(np.sqrt(2 * cfg.alpha) * eps, rel=1e-9)
    assert quantum_statistical_distance(E1, global_phase(E1, 2.5), cfg) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_global_phase_path_length(cfg_factory, rng, alpha):
    cfg = cfg_factory(n=3, alpha=alpha)
    psi = random_wave(3, rng)
    dtheta = 3.0
    grid = np.linspace(0.0, 1.0, 2001)
    path = WavePath.from_vectors([global_phase(psi, dtheta * t) for t in grid], grid)
    np.testing.assert_allclose(path.samples[-1].psi, global_phase(psi, dtheta).psi, atol=1e-15)
    assert complex_curve_length(path, cfg) == pytest.approx(np.sqrt(2 * alpha) * dtheta, rel=1e-5)


def test_quantum_distance_needs_normalized_states(cfg):
    with pytest.raises(ValueError):
        quantum_statistical_distance(WaveVector([1.0, 1.0]), E1, cfg)


def test_great_circle_attains_distance(cfg_factory, rng):
    cfg = cfg_factory(n=3)
    a, b = random_wave(3, rng), random_wave(3, rng)
    path = great_circle_path(a, b, 4001)
    assert complex_curve_length(path, cfg) == pytest.approx(quantum_statistical_distance(a, b, cfg), abs=1e-6)


def test_great_circle_between_equal_rays_is_constant(cfg):
    path = great_circle_path(E1, global_phase(E1, np.pi / 2), 5)
    assert complex_curve_length(path, cfg) == 0.0


def test_wave_path_rejects_unnormalized_samples():
    with pytest.raises(ValueError):
        WavePath(np.array([[1.0, 0.0], [1.0, 1.0]]))


def test_wave_vector_shape():
    with pytest.raises(DimensionError):
        WaveVector(np.zeros((2, 2)))
