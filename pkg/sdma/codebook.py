"""Quantization codebook made of M random orthonormal sets, the quantizer, the
feedback gate and Monte Carlo codeword priors.

Codeword indices are 0-based: entry k belongs to orthonormal set k // n_T.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sdma.core_math import ChannelRealization, complex_gaussian, draw_orthonormal_basis, pairwise_distortion
from sdma.errors import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.1
DEFAULT_G_TH = 2.0
MIN_PRIOR_SAMPLES = 10_000
_PRIOR_CHUNK = 50_000


@dataclass(frozen=True, eq=False)
class Codebook:
    entries: np.ndarray  # (N, n_T) complex, unit rows
    n_t: int
    c_fb: int
    pairwise_sin: np.ndarray  # (N, N)
    seed: int | None = None

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    @property
    def n_sets(self) -> int:
        return -(-self.size // self.n_t)

    def set_of(self, index: int) -> int:
        return int(index) // self.n_t

    def set_members(self, set_id: int) -> list[int]:
        start = set_id * self.n_t
        return list(range(start, min(start + self.n_t, self.size)))


@dataclass(frozen=True)
class GateDecision:
    feed_back: bool
    index: int
    distortion: float


def codebook_from_entries(
    entries: np.ndarray, n_t: int, c_fb: int, seed: int | None = None
) -> Codebook:
    pairwise_sin = np.sqrt(pairwise_distortion(entries))
    return Codebook(entries=entries, n_t=n_t, c_fb=c_fb, pairwise_sin=pairwise_sin, seed=seed)


def build_codebook(
    rng: np.random.Generator,
    n_t: int,
    c_fb: int,
    *,
    partial: bool = False,
    seed: int | None = None,
) -> Codebook:
    """
    Draw N = 2^c_fb codewords as M = N/n_T independent Haar bases.

    With ``partial=True`` a codebook smaller than one set (N < n_T) is allowed: it
    keeps the first N vectors of a single basis. The coded feedback baseline
    needs this when parity bits leave fewer than log2(n_T) payload bits.
    """
    if c_fb < 0 or int(c_fb) != c_fb:
        raise ConfigurationError(f"C_fb must be a non-negative integer (got {c_fb})")
    size = 2 ** int(c_fb)
    if size % n_t:
        if not (partial and size < n_t):
            raise ConfigurationError(
                f"codebook size 2^C_fb = {size} (C_fb={c_fb}) is not divisible by n_T={n_t}"
            )
        basis = draw_orthonormal_basis(rng, n_t)
        return codebook_from_entries(basis.vectors[:size].copy(), n_t, c_fb, seed)

    bases = [draw_orthonormal_basis(rng, n_t).vectors for _ in range(size // n_t)]
    entries = np.vstack(bases)
    logger.debug("built codebook n_T=%d C_fb=%d (%d sets)", n_t, c_fb, len(bases))
    return codebook_from_entries(entries, n_t, c_fb, seed)


def quantize(shape: np.ndarray, cb: Codebook) -> int:
    """Index of the codeword with minimum distortion; ties go to the smallest index."""
    corr = np.abs(cb.entries.conj() @ np.asarray(shape, dtype=complex)) ** 2
    return int(np.argmin(1.0 - corr))


def quantize_many(shapes: np.ndarray, cb: Codebook) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized quantize over rows of ``shapes``; returns (indices, min distortions)."""
    corr = np.abs(shapes @ cb.entries.conj().T) ** 2
    dist = 1.0 - corr
    idx = np.argmin(dist, axis=1)
    return idx, np.clip(dist[np.arange(dist.shape[0]), idx], 0.0, 1.0)


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ConfigurationError(f"delta must lie in (0, 1) (got {delta})")


def feedback_gate(h: ChannelRealization, cb: Codebook, delta: float, g_th: float) -> GateDecision:
    """Feed back iff the quantization distortion is below delta and the gain above g_th."""
    _check_delta(delta)
    if h.n_t != cb.n_t:
        raise DimensionError(f"channel has {h.n_t} antennas, codebook expects {cb.n_t}")
    index = quantize(h.shape, cb)
    dist = float(1.0 - abs(np.vdot(cb.entries[index], h.shape)) ** 2)
    return GateDecision(feed_back=bool(dist < delta and h.gain > g_th), index=index, distortion=dist)


def gate_many(
    gains: np.ndarray, shapes: np.ndarray, cb: Codebook, delta: float, g_th: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized feedback_gate; returns (feed-back mask, quantization indices)."""
    _check_delta(delta)
    idx, dist = quantize_many(shapes, cb)
    return (dist < delta) & (gains > g_th), idx


def codeword_priors(
    cb: Codebook,
    delta: float,
    g_th: float,
    n_samples: int,
    rng: np.random.Generator,
    *,
    gated: bool = True,
) -> np.ndarray:
    """
    Monte Carlo estimate of Pr(v_i): the law of quantize(shape) over isotropic
    shapes, conditioned on the shape gate unless ``gated`` is False.

    The gain gate is independent of the shape, so g_th does not change the result.
    Add-one smoothing keeps every prior strictly positive.
    """
    _check_delta(delta)
    if n_samples < MIN_PRIOR_SAMPLES:
        raise ConfigurationError(f"n_samples must be >= {MIN_PRIOR_SAMPLES} (got {n_samples})")

    counts = np.zeros(cb.size, dtype=np.int64)
    remaining = int(n_samples)
    while remaining > 0:
        batch = min(remaining, _PRIOR_CHUNK)
        z = complex_gaussian(rng, (batch, cb.n_t))
        shapes = z / np.linalg.norm(z, axis=1)[:, None]
        idx, dist = quantize_many(shapes, cb)
        if gated:
            idx = idx[dist < delta]
        counts += np.bincount(idx, minlength=cb.size)
        remaining -= batch

    accepted = int(counts.sum())
    logger.debug("priors: %d of %d samples passed the shape gate", accepted, n_samples)
    return (counts + 1.0) / (accepted + cb.size)


def save_codebook(cb: Codebook, path: str | Path) -> None:
    """Write the codebook as JSON: n_T, C_fb, seed and interleaved real/imag entries (row-major)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    interleaved = np.empty(cb.entries.size * 2)
    flat = cb.entries.reshape(-1)
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    data = {
        "n_t": cb.n_t,
        "c_fb": cb.c_fb,
        "seed": cb.seed,
        "size": cb.size,
        "entries": [float(x) for x in interleaved],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)


def load_codebook(path: str | Path) -> Codebook:
    with open(Path(path), encoding="utf-8") as f:
        data = json.load(f)
    n_t = int(data["n_t"])
    values = np.asarray(data["entries"], dtype=float)
    entries = (values[0::2] + 1j * values[1::2]).reshape(-1, n_t)
    return codebook_from_entries(entries, n_t, int(data["c_fb"]), data.get("seed"))
