"""Shortened Hamming codes and the Hamming-protected feedback baseline.

A code of length n uses the smallest m with 2^m - 1 >= n parity bits and carries
k = n - m payload bits. Codewords are systematic: [data | parity].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sdma.errors import ConfigurationError, DimensionError
from sdma.feedback_channel import TransitionMatrix, gray_code, gray_decode, psk_transition_matrix


def hamming_parity_bits(n: int) -> int:
    m = 1
    while 2**m - 1 < n:
        m += 1
    return m


def hamming_payload_bits(n: int) -> int:
    """Payload bits of the shortened Hamming code of length n (0 when none fits)."""
    if n < 3:
        return 0
    return n - hamming_parity_bits(n)


@dataclass(frozen=True, eq=False)
class HammingCode:
    n: int
    k: int = field(init=False)
    m: int = field(init=False)
    parity_check: np.ndarray = field(init=False, repr=False)
    position_of_syndrome: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if hamming_payload_bits(self.n) < 1:
            raise ConfigurationError(f"no Hamming code fits {self.n} coded bits (need at least 3)")
        m = hamming_parity_bits(self.n)
        k = self.n - m
        data_cols = [c for c in range(1, 2**m) if c & (c - 1)][:k]
        parity_cols = [1 << r for r in range(m)]
        columns = data_cols + parity_cols
        h = np.array([[(c >> r) & 1 for c in columns] for r in range(m)], dtype=np.int64)
        lookup = np.full(2**m, -1, dtype=np.int64)
        for pos, c in enumerate(columns):
            lookup[c] = pos
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "parity_check", h)
        object.__setattr__(self, "position_of_syndrome", lookup)

    def encode(self, data: np.ndarray) -> np.ndarray:
        """Encode rows of ``data`` (shape (..., k)) into codewords (shape (..., n))."""
        data = np.asarray(data, dtype=np.int64)
        parity = (data @ self.parity_check[:, : self.k].T) % 2
        return np.concatenate([data, parity], axis=-1)

    def syndrome(self, words: np.ndarray) -> np.ndarray:
        words = np.asarray(words, dtype=np.int64)
        bits = (words @ self.parity_check.T) % 2
        return bits @ (1 << np.arange(self.m))

    def decode(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Single-error-correcting decode.

        Returns (data, clean) where ``clean`` is False for words whose syndrome
        matched no column of a shortened code (detected, left uncorrected).
        """
        words = np.array(words, dtype=np.int64, copy=True)
        flat = words.reshape(-1, self.n)
        syn = np.atleast_1d(self.syndrome(flat))
        pos = self.position_of_syndrome[syn]
        fix = (syn != 0) & (pos >= 0)
        rows = np.nonzero(fix)[0]
        flat[rows, pos[rows]] ^= 1
        clean = (syn == 0) | fix
        data = flat[:, : self.k].reshape(words.shape[:-1] + (self.k,))
        return data, clean.reshape(words.shape[:-1])


def int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    """MSB-first bit rows of the non-negative integers in ``values``."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return (values[..., None] >> shifts) & 1


def bits_to_int(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    return bits @ (1 << np.arange(width - 1, -1, -1))


@dataclass(frozen=True, eq=False)
class HammingFeedbackLink:
    """
    Coded bits grouped into Gray-labelled symbols of ``bits_per_symbol`` bits and
    sent through ``p_ch``. With bits_per_symbol=1 each coded bit is one BPSK symbol.
    """

    code: HammingCode
    bits_per_symbol: int
    p_ch: TransitionMatrix

    @property
    def n_symbols(self) -> int:
        return self.code.n // self.bits_per_symbol

    def send(self, payload: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Send payload indices (k-bit integers); returns decoded payload indices."""
        payload = np.asarray(payload, dtype=np.int64)
        b = self.bits_per_symbol
        words = self.code.encode(int_to_bits(payload, self.code.k))
        labels = bits_to_int(words.reshape(payload.shape[0], self.n_symbols, b))
        to_point = np.array([gray_decode(v) for v in range(2**b)])
        to_label = np.array([gray_code(p) for p in range(2**b)])
        sent_points = to_point[labels]
        u = rng.random(sent_points.shape)
        cum = np.cumsum(self.p_ch.probs, axis=1)[sent_points]
        received = np.minimum((cum <= u[..., None]).sum(axis=-1), 2**b - 1)
        rx_words = int_to_bits(to_label[received], b).reshape(payload.shape[0], self.code.n)
        data, _ = self.code.decode(rx_words)
        return bits_to_int(data)


def coded_link(
    symbol_budget: int, bits_per_symbol: int, p_ch: TransitionMatrix
) -> HammingFeedbackLink:
    """The Hamming baseline filling ``symbol_budget`` symbols; raises if no code fits."""
    n = symbol_budget * bits_per_symbol
    if hamming_payload_bits(n) < 1:
        raise ConfigurationError(
            f"feedback budget of {symbol_budget} symbol(s) x {bits_per_symbol} bit(s) is too small for any Hamming code"
        )
    if p_ch.size != 2**bits_per_symbol:
        raise ConfigurationError(
            f"per-symbol transition matrix has {p_ch.size} points, expected {2**bits_per_symbol}"
        )
    return HammingFeedbackLink(code=HammingCode(n), bits_per_symbol=bits_per_symbol, p_ch=p_ch)


def hamming_feedback(
    info_bits,
    total_symbol_budget: int,
    feedback_snr_db: float,
    rng: np.random.Generator,
    *,
    bits_per_symbol: int = 1,
    p_ch: TransitionMatrix | None = None,
) -> np.ndarray:
    """
    Protect ``info_bits`` with the shortened Hamming code that fills the symbol
    budget, send it over PSK at ``feedback_snr_db`` (or over ``p_ch``) and decode.
    """
    if p_ch is None:
        p_ch = psk_transition_matrix(2**bits_per_symbol, feedback_snr_db)
    link = coded_link(total_symbol_budget, bits_per_symbol, p_ch)
    info = np.asarray(info_bits, dtype=np.int64)
    if info.ndim not in (1, 2):
        raise DimensionError(f"info_bits must be (k,) or (blocks, k), got shape {info.shape}")
    if info.shape[-1] != link.code.k:
        raise ConfigurationError(
            f"{info.shape[-1]} payload bits given, the ({link.code.n},{link.code.k}) code carries {link.code.k}"
        )
    received = link.send(np.atleast_1d(bits_to_int(info)), rng)
    decoded = int_to_bits(received, link.code.k)
    return decoded[0] if info.ndim == 1 else decoded
