import numpy as np
import pytest
from scipy.stats import kstest

from sdma.core_math import (
    channel_from_vector,
    distortion,
    draw_channel,
    draw_channels,
    draw_orthonormal_basis,
    pairwise_distortion,
    sin_angle,
)
from sdma.errors import ConfigurationError, NormalizationError


def test_channel_splits_into_gain_and_unit_shape(rng):
    h = draw_channel(rng, 4)
    assert h.n_t == 4
    assert h.gain == pytest.approx(float(np.sum(np.abs(h.h) ** 2)))
    assert np.linalg.norm(h.shape) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(h.shape * np.sqrt(h.gain), h.h)


def test_draw_channels_matches_shapes(rng):
    h, gains, shapes = draw_channels(rng, 3, 500)
    assert h.shape == (500, 3) and gains.shape == (500,) and shapes.shape == (500, 3)
    assert np.allclose(np.linalg.norm(shapes, axis=1), 1.0, atol=1e-12)
    # E||h||^2 = n_T for unit-variance entries
    assert gains.mean() == pytest.approx(3.0, rel=0.1)


def test_n_t_below_two_is_rejected(rng):
    with pytest.raises(ConfigurationError):
        draw_channel(rng, 1)
    with pytest.raises(ConfigurationError):
        draw_orthonormal_basis(rng, 1)


def test_distortion_examples():
    e1 = np.array([1, 0, 0, 0], dtype=complex)
    e2 = np.array([0, 1, 0, 0], dtype=complex)
    assert distortion(e1, e1) == 0.0
    assert distortion(e1, e2) == 1.0
    mixed = np.array([np.sqrt(0.75), 0.5j, 0, 0])
    assert sin_angle(e1, mixed) == pytest.approx(0.5, abs=1e-12)
    # a global phase does not change the angle
    assert distortion(mixed, 1j * mixed) == pytest.approx(0.0, abs=1e-12)


def test_distortion_rejects_non_unit_vectors():
    with pytest.raises(NormalizationError):
        distortion(np.array([2.0, 0.0]), np.array([1.0, 0.0]))


def test_basis_is_orthonormal(rng):
    for n_t in (2, 4, 8):
        basis = draw_orthonormal_basis(rng, n_t)
        gram = basis.vectors.conj() @ basis.vectors.T
        assert len(basis) == n_t
        assert np.allclose(gram, np.eye(n_t), atol=1e-12)


def test_pairwise_distortion_of_a_basis_is_one_off_diagonal(rng):
    basis = draw_orthonormal_basis(rng, 4)
    d = pairwise_distortion(basis.vectors)
    assert np.allclose(d, 1.0 - np.eye(4), atol=1e-12)


def test_basis_cosines_sum_to_one(rng):
    """cos^2 to every member of a full orthonormal basis adds up to 1 for any unit shape."""
    for _ in range(200):
        basis = draw_orthonormal_basis(rng, 4)
        shape = draw_channel(rng, 4).shape
        cos2 = np.abs(basis.vectors.conj() @ shape) ** 2
        assert cos2.sum() == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("n_t", [2, 3, 4])
def test_sine_to_fixed_vector_has_the_isotropic_law(n_t, rng):
    """Pr(sin(theta) < x) = x^(2 (n_T - 1)) for isotropic shapes."""
    v = draw_orthonormal_basis(rng, n_t)[0]
    _, _, shapes = draw_channels(rng, n_t, 100_000)
    sins = np.sqrt(np.clip(1.0 - np.abs(shapes @ v.conj()) ** 2, 0.0, 1.0))
    result = kstest(sins, lambda x: np.clip(x, 0.0, 1.0) ** (2 * (n_t - 1)))
    assert result.statistic < 0.01


@pytest.mark.slow
@pytest.mark.parametrize("n_t", [2, 3, 4])
def test_sine_law_with_a_million_draws(n_t):
    rng = np.random.default_rng([99, n_t])
    v = draw_orthonormal_basis(rng, n_t)[0]
    _, _, shapes = draw_channels(rng, n_t, 1_000_000)
    sins = np.sqrt(np.clip(1.0 - np.abs(shapes @ v.conj()) ** 2, 0.0, 1.0))
    result = kstest(sins, lambda x: np.clip(x, 0.0, 1.0) ** (2 * (n_t - 1)))
    assert result.pvalue > 1e-3


def test_channel_from_vector():
    h = channel_from_vector([3.0, 4.0j])
    assert h.gain == pytest.approx(25.0)
    assert np.allclose(h.shape, [0.6, 0.8j])
