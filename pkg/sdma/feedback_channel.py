"""Noisy CSIT feedback link: PSK constellations, symbol transition matrices,
the index mapping xi and the CSIT index transition P_CSIT[i][j] = P_ch[xi(i)][xi(j)].

Matrices are row-stochastic with rows = sent point and columns = received point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from sdma.errors import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

ROW_TOL = 1e-9
QUAD_RTOL = 1e-8
CHANNEL_MODELS = ("psk-awgn", "nearest-neighbor")


@dataclass(frozen=True, eq=False)
class Constellation:
    order: int
    points: np.ndarray

    @property
    def bits(self) -> int:
        return int(math.log2(self.order))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = self.probs
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError(f"transition matrix must be square (got shape {p.shape})")
        if np.any(p < -ROW_TOL) or np.any(p > 1.0 + ROW_TOL):
            raise ConfigurationError("transition probabilities must lie in [0, 1]")
        worst = float(np.max(np.abs(p.sum(axis=1) - 1.0)))
        if worst > ROW_TOL:
            raise ConfigurationError(f"transition matrix rows must sum to 1 (off by {worst:.3g})")

    @property
    def size(self) -> int:
        return int(self.probs.shape[0])

    def __getitem__(self, key):
        return self.probs[key]


@dataclass(frozen=True, eq=False)
class IndexMapping:
    """Bijection xi from codeword index to constellation point, with its inverse."""

    forward: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_forward(cls, forward) -> "IndexMapping":
        forward = np.asarray(forward, dtype=np.int64)
        n = forward.shape[0]
        if sorted(forward.tolist()) != list(range(n)):
            raise ConfigurationError("index mapping must be a permutation of 0..N-1")
        inverse = np.empty(n, dtype=np.int64)
        inverse[forward] = np.arange(n)
        return cls(forward=forward, inverse=inverse)

    @classmethod
    def identity(cls, n: int) -> "IndexMapping":
        return cls.from_forward(np.arange(n))

    @property
    def size(self) -> int:
        return int(self.forward.shape[0])

    def __call__(self, index: int) -> int:
        return int(self.forward[index])


def _check_order(order: int) -> None:
    if order < 2 or order & (order - 1):
        raise ConfigurationError(f"constellation order must be a power of two >= 2 (got {order})")


def psk_constellation(order: int) -> Constellation:
    _check_order(order)
    angles = 2.0 * np.pi * np.arange(order) / order
    return Constellation(order=order, points=np.exp(1j * angles))


def _phase_density(theta: float, snr: float) -> float:
    """Density of the received phase for the point at angle 0, r = sqrt(snr) + CN(0, 1)."""
    a = math.sqrt(snr) * math.cos(theta)
    return (
        math.exp(-snr) / (2.0 * math.pi)
        + a / (2.0 * math.sqrt(math.pi)) * math.exp(-snr * math.sin(theta) ** 2) * (1.0 + erf(a))
    )


@lru_cache(maxsize=64)
def _psk_row(order: int, snr_db: float) -> tuple[float, ...]:
    snr = 10.0 ** (snr_db / 10.0)
    half = math.pi / order
    row = []
    for l in range(order):
        centre = 2.0 * math.pi * l / order
        value, _ = quad(_phase_density, centre - half, centre + half, args=(snr,), epsrel=QUAD_RTOL)
        row.append(value)
    row = np.clip(np.asarray(row), 0.0, None)
    return tuple(row / row.sum())


def psk_transition_matrix(order: int, feedback_snr_db: float) -> TransitionMatrix:
    """
    ML-detector transition matrix of order-PSK over unit-variance complex AWGN,
    integrating the received-phase density over each decision sector.
    """
    _check_order(order)
    if not math.isfinite(feedback_snr_db):
        raise ConfigurationError(f"feedback SNR must be finite (got {feedback_snr_db})")
    row = np.asarray(_psk_row(order, float(feedback_snr_db)))
    # Circulant: entry (k, l) depends only on l - k.
    probs = np.stack([np.roll(row, k) for k in range(order)])
    return TransitionMatrix(probs=probs)


def psk_transition_matrix_mc(
    order: int, feedback_snr_db: float, n_samples: int, rng: np.random.Generator
) -> TransitionMatrix:
    """Monte Carlo estimate of psk_transition_matrix, used to cross-check the quadrature."""
    const = psk_constellation(order)
    snr = 10.0 ** (feedback_snr_db / 10.0)
    sent = rng.integers(0, order, n_samples)
    noise = rng.normal(0.0, math.sqrt(0.5), n_samples) + 1j * rng.normal(0.0, math.sqrt(0.5), n_samples)
    received = math.sqrt(snr) * const.points[sent] + noise
    detected = np.round(np.angle(received) / (2.0 * np.pi / order)).astype(np.int64) % order
    counts = np.zeros((order, order))
    np.add.at(counts, (sent, detected), 1.0)
    return TransitionMatrix(probs=counts / counts.sum(axis=1, keepdims=True))


def parametric_nn_transition(order: int, p_e: float) -> TransitionMatrix:
    """Nearest-constellation error model: an error lands on a ring neighbour, P_e/2 each."""
    if order < 2:
        raise ConfigurationError(f"constellation order must be >= 2 (got {order})")
    if not 0.0 <= p_e < 1.0:
        raise ConfigurationError(f"symbol error rate must lie in [0, 1) (got {p_e})")
    probs = np.eye(order) * (1.0 - p_e)
    for k in range(order):
        if order == 2:
            probs[k, 1 - k] = p_e
        else:
            probs[k, (k + 1) % order] += p_e / 2.0
            probs[k, (k - 1) % order] += p_e / 2.0
    return TransitionMatrix(probs=probs)


def kron_transition(per_symbol: list[TransitionMatrix]) -> TransitionMatrix:
    """Transition matrix of several independent symbols; the first symbol is most significant."""
    probs = np.ones((1, 1))
    for m in per_symbol:
        probs = np.kron(probs, m.probs)
    return TransitionMatrix(probs=probs)


def feedback_transition(
    model: str,
    bits_per_symbol: int,
    n_symbols: int = 1,
    *,
    snr_db: float | None = None,
    ser: float | None = None,
) -> TransitionMatrix:
    """P_ch for ``n_symbols`` symbols of a 2^bits_per_symbol-ary constellation."""
    order = 2 ** int(bits_per_symbol)
    if model == "psk-awgn":
        if snr_db is None:
            raise ConfigurationError("model psk-awgn needs snr_db")
        single = psk_transition_matrix(order, snr_db)
    elif model == "nearest-neighbor":
        if ser is None:
            raise ConfigurationError("model nearest-neighbor needs ser")
        single = parametric_nn_transition(order, ser)
    else:
        raise ConfigurationError(f"unknown feedback model {model!r}; expected one of {CHANNEL_MODELS}")
    if n_symbols == 1:
        return single
    return kron_transition([single] * n_symbols)


def csit_transition(p_ch: TransitionMatrix, xi: IndexMapping) -> TransitionMatrix:
    """P_CSIT[i][j] = P_ch[xi(i)][xi(j)]."""
    if p_ch.size != xi.size:
        raise DimensionError(f"P_ch is {p_ch.size}x{p_ch.size} but the mapping has {xi.size} entries")
    f = xi.forward
    return TransitionMatrix(probs=p_ch.probs[np.ix_(f, f)])


def transmit_index(
    sent: int, xi: IndexMapping, p_ch: TransitionMatrix, rng: np.random.Generator
) -> int:
    """Send codeword ``sent`` over the link; returns the received codeword index."""
    return int(transmit_indices(np.asarray([sent]), xi, p_ch, rng)[0])


def transmit_indices(
    sent: np.ndarray, xi: IndexMapping, p_ch: TransitionMatrix, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized transmit_index; consumes exactly one uniform per sent index."""
    sent = np.asarray(sent, dtype=np.int64)
    u = rng.random(sent.shape[0])
    cum = np.cumsum(p_ch.probs[xi.forward[sent]], axis=1)
    points = np.minimum((cum <= u[:, None]).sum(axis=1), p_ch.size - 1)
    return xi.inverse[points]


def greedy_mass_set(probs: np.ndarray, anchor: int, eps: float) -> list[int]:
    """
    Smallest set containing ``anchor`` whose mass in ``probs`` reaches 1 - eps,
    filled greedily by descending probability (stable on ties).
    """
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must lie in (0, 1) (got {eps})")
    probs = np.asarray(probs, dtype=float)
    members = [int(anchor)]
    total = float(probs[anchor])
    for j in np.argsort(-probs, kind="stable"):
        if total >= 1.0 - eps - 1e-12:
            break
        if j == anchor:
            continue
        members.append(int(j))
        total += float(probs[j])
    return members


def neighbor_set(p_ch: TransitionMatrix, point: int, eps: float) -> tuple[list[int], int]:
    """Neighbour set N_n of ``point``: the points that carry 1 - eps of its row."""
    members = greedy_mass_set(p_ch.probs[point], point, eps)
    return members, len(members)


def symbol_error_rate(p_ch: TransitionMatrix) -> float:
    return float(1.0 - np.mean(np.diag(p_ch.probs)))


def gray_code(n: int) -> int:
    return n ^ (n >> 1)


def gray_decode(g: int) -> int:
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n
