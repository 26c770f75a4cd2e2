"""Complex vector primitives: random channels, random orthonormal bases and the
chordal distortion d(v1, v2) = 1 - |v1^H v2|^2 everything else is built on.

All randomness comes from an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr

from sdma.errors import ConfigurationError, NormalizationError

# Tolerance for vectors this module constructs.
BUILD_TOL = 1e-12
# Tolerance accepted on caller-supplied unit vectors.
INPUT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One user's channel h split into gain ||h||^2 and unit-norm shape h/||h||."""

    h: np.ndarray
    gain: float
    shape: np.ndarray

    @property
    def n_t(self) -> int:
        return int(self.h.shape[0])


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """n_T orthonormal complex vectors, stored one per row."""

    vectors: np.ndarray

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def __getitem__(self, k: int) -> np.ndarray:
        return self.vectors[k]


def _check_n_t(n_t: int) -> None:
    if int(n_t) != n_t or n_t < 2:
        raise ConfigurationError(f"n_T must be an integer >= 2 (got {n_t})")


def complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    """i.i.d. circular complex Gaussians with unit variance (N(0, 1/2) per part)."""
    scale = np.sqrt(0.5)
    return rng.normal(0.0, scale, size) + 1j * rng.normal(0.0, scale, size)


def draw_channel(rng: np.random.Generator, n_t: int) -> ChannelRealization:
    _check_n_t(n_t)
    h = complex_gaussian(rng, n_t)
    gain = float(np.real(np.vdot(h, h)))
    return ChannelRealization(h=h, gain=gain, shape=h / np.sqrt(gain))


def draw_channels(
    rng: np.random.Generator, n_t: int, count: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Draw ``count`` independent channels at once.

    Returns (H, gains, shapes) with H and shapes of shape (count, n_T).
    """
    _check_n_t(n_t)
    h = complex_gaussian(rng, (count, n_t))
    gains = np.sum(np.abs(h) ** 2, axis=1)
    shapes = h / np.sqrt(gains)[:, None]
    return h, gains, shapes


def channel_from_vector(h: np.ndarray) -> ChannelRealization:
    h = np.asarray(h, dtype=complex)
    gain = float(np.real(np.vdot(h, h)))
    return ChannelRealization(h=h, gain=gain, shape=h / np.sqrt(gain))


def _check_unit(v: np.ndarray, name: str) -> None:
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > INPUT_TOL:
        raise NormalizationError(f"{name} has norm {norm:.12g}, expected 1")


def distortion(v1: np.ndarray, v2: np.ndarray) -> float:
    """1 - |v1^H v2|^2, the squared sine of the principal angle."""
    v1 = np.asarray(v1, dtype=complex)
    v2 = np.asarray(v2, dtype=complex)
    _check_unit(v1, "v1")
    _check_unit(v2, "v2")
    d = 1.0 - abs(np.vdot(v1, v2)) ** 2
    return float(min(1.0, max(0.0, d)))


def sin_angle(v1: np.ndarray, v2: np.ndarray) -> float:
    return float(np.sqrt(distortion(v1, v2)))


def pairwise_distortion(vectors: np.ndarray) -> np.ndarray:
    """Distortion matrix between the rows of ``vectors``."""
    gram = vectors.conj() @ vectors.T
    d = 1.0 - np.abs(gram) ** 2
    np.fill_diagonal(d, 0.0)
    return np.clip(d, 0.0, 1.0)


def draw_orthonormal_basis(rng: np.random.Generator, n_t: int) -> OrthonormalBasis:
    """
    Haar-distributed orthonormal basis: QR of a complex Gaussian matrix with the
    diagonal of R rotated to the positive real axis so the factorization is unique.
    """
    _check_n_t(n_t)
    z = complex_gaussian(rng, (n_t, n_t))
    q, r = qr(z)
    diag = np.diag(r)
    phases = diag / np.abs(diag)
    q = q * phases[None, :]
    return OrthonormalBasis(vectors=np.ascontiguousarray(q.T))
