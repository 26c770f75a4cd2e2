"""Base-station side of a slot: the outage-bounded rate table, PU2RC-style
scheduling onto one orthonormal set, and the mutual information used to judge
outage.

Rates are in b/s/Hz. Rows of the rate table are keyed by the received index I
and read column I of P_CSIT (probability that j was sent given that I arrived).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from sdma.codebook import Codebook
from sdma.core_math import INPUT_TOL, ChannelRealization
from sdma.errors import ConfigurationError, DimensionError, NoFeedbackError, NormalizationError
from sdma.feedback_channel import TransitionMatrix, greedy_mass_set

logger = logging.getLogger(__name__)

# Stand-in for infinite mutual information (sin theta = 0).
SATURATION_RATE = 64.0
_EPS_RES_CEILING = 1.0 - 1e-12

INTERFERENCE_LIMITED = "interference-limited"
NOISE_LIMITED = "noise-limited"


@dataclass(frozen=True)
class RateRow:
    index: int
    ns_set: tuple[int, ...]
    i_star: int
    eps_res: float
    rate: float
    sin_istar: float
    p_istar: float
    tail: float


@dataclass(frozen=True)
class RateTable:
    rows: tuple[RateRow, ...]
    delta: float
    eps: float
    n_t: int

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: int) -> RateRow:
        return self.rows[index]

    @property
    def rates(self) -> np.ndarray:
        return np.array([row.rate for row in self.rows])


@dataclass(frozen=True, eq=False)
class Assignment:
    user: int
    index: int
    precoder: np.ndarray


@dataclass(frozen=True, eq=False)
class ScheduleOutcome:
    chosen_set: int
    assignments: tuple[Assignment, ...]
    unfilled_slots: int


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ConfigurationError(f"{name} must lie in (0, 1) (got {value})")


def _rate_from_row(sin_istar: float, p_istar: float, eps_res: float, delta: float, n_t: int) -> float:
    base = 1.0 - eps_res / p_istar
    arg = math.sqrt(delta) * base ** (1.0 / (2 * (n_t - 1))) + sin_istar
    if arg >= 1.0:
        return 0.0
    return -2.0 * math.log2(arg)


def build_rate_table(
    p_csit: TransitionMatrix,
    cb: Codebook,
    delta: float,
    eps: float,
    n_t: int | None = None,
    *,
    likely_istar: bool = False,
) -> RateTable:
    """
    One row per received index I:

    * ns_set: greedy by descending P_CSIT[j][I], starting from I, until it holds 1 - eps;
    * i_star: member of ns_set with the largest sin angle to v_I;
    * eps_res = eps - (mass outside ns_set), clamped to [0, P_CSIT[i_star][I]);
    * rate = -2 log2( sqrt(delta) (1 - eps_res / P_CSIT[i_star][I])^(1 / (2 (n_T - 1))) + sin(I, i_star) ),
      clamped at 0.

    ``likely_istar`` picks the most likely neighbour other than I as i_star
    instead, the reading under which the four-codeword worked example picks v3.
    """
    _check_open_unit("eps", eps)
    _check_open_unit("delta", delta)
    n_t = cb.n_t if n_t is None else int(n_t)
    if p_csit.size != cb.size:
        raise DimensionError(f"P_CSIT is {p_csit.size}x{p_csit.size} for a codebook of {cb.size}")

    probs = p_csit.probs
    rows = []
    for received in range(cb.size):
        column = probs[:, received]
        ns = greedy_mass_set(column, received, eps)
        mass = float(column[ns].sum())
        if mass < 1.0 - eps - 1e-12:
            raise ConfigurationError(
                f"row {received}: column mass {mass:.6g} cannot reach 1 - eps = {1.0 - eps:.6g}"
            )
        tail = float(column.sum()) - mass
        sins = cb.pairwise_sin[received]
        if likely_istar and len(ns) > 1:
            i_star = ns[1]
        else:
            i_star = max(ns, key=lambda j: (sins[j], -j))
        p_istar = float(column[i_star])
        eps_res = min(max(eps - tail, 0.0), p_istar * _EPS_RES_CEILING)
        rate = _rate_from_row(float(sins[i_star]), p_istar, eps_res, delta, n_t)
        rows.append(
            RateRow(
                index=received,
                ns_set=tuple(ns),
                i_star=int(i_star),
                eps_res=eps_res,
                rate=rate,
                sin_istar=float(sins[i_star]),
                p_istar=p_istar,
                tail=max(tail, 0.0),
            )
        )
    logger.debug("rate table: N=%d eps=%.3g mean rate %.4f", cb.size, eps, np.mean([r.rate for r in rows]))
    return RateTable(rows=tuple(rows), delta=float(delta), eps=float(eps), n_t=n_t)


def outage_bound(rate: float, index: int, table: RateTable) -> float:
    """Upper bound on Pr(outage | received ``index``) when transmitting at ``rate``."""
    row = table[index]
    gap = max(2.0 ** (-rate / 2.0) - row.sin_istar, 0.0)
    ratio = gap ** (2 * (table.n_t - 1)) / table.delta ** (table.n_t - 1)
    return (1.0 - min(max(ratio, 0.0), 1.0)) * row.p_istar + row.tail


def schedule(
    received: Mapping[int, int], cb: Codebook, rng: np.random.Generator
) -> ScheduleOutcome:
    """
    Pick one orthonormal set whose every vector was reported by some user
    (uniformly among such sets), then one reporting user per vector (uniformly).

    If no set is fully covered, the set covering the most distinct vectors is
    used (smallest set id on ties) and its uncovered slots stay empty.
    """
    if not received:
        raise NoFeedbackError("no user fed back in this slot")
    reporters: dict[int, list[int]] = {}
    for user in sorted(received):
        reporters.setdefault(int(received[user]), []).append(int(user))

    coverage = [
        sum(1 for v in cb.set_members(m) if v in reporters) for m in range(cb.n_sets)
    ]
    complete = [m for m in range(cb.n_sets) if coverage[m] == len(cb.set_members(m))]
    if complete:
        chosen = complete[int(rng.integers(len(complete)))] if len(complete) > 1 else complete[0]
    else:
        chosen = int(np.argmax(coverage))

    assignments = []
    for v in cb.set_members(chosen):
        users = reporters.get(v)
        if not users:
            continue
        user = users[int(rng.integers(len(users)))] if len(users) > 1 else users[0]
        assignments.append(Assignment(user=user, index=v, precoder=cb.entries[v]))
    return ScheduleOutcome(
        chosen_set=chosen,
        assignments=tuple(assignments),
        unfilled_slots=cb.n_t - len(assignments),
    )


def _check_precoders(precoders: np.ndarray) -> None:
    norms = np.linalg.norm(precoders, axis=-1)
    if np.any(np.abs(norms - 1.0) > INPUT_TOL):
        raise NormalizationError("precoders must be unit-norm")


def mutual_info_exact(
    h: ChannelRealization,
    w_k: np.ndarray,
    interferers,
    power: float,
    n_t: int,
) -> float:
    """log2(1 + (P/n_T)|h^H w_k|^2 / (1 + sum_j (P/n_T)|h^H w_j|^2))."""
    w_k = np.asarray(w_k, dtype=complex)
    others = np.asarray(list(interferers), dtype=complex).reshape(-1, w_k.shape[0])
    _check_precoders(np.vstack([w_k[None, :], others]))
    scale = power / n_t
    signal = scale * abs(np.vdot(h.h, w_k)) ** 2
    interference = scale * float(np.sum(np.abs(others.conj() @ h.h) ** 2))
    return float(math.log2(1.0 + signal / (1.0 + interference)))


def slot_mutual_info(h_rows: np.ndarray, precoders: np.ndarray, power: float, n_t: int) -> np.ndarray:
    """
    Exact mutual information of every scheduled user in a slot at once.

    ``h_rows[k]`` is the channel of the user served by ``precoders[k]``; all the
    other rows of ``precoders`` are its interference.
    """
    gains = (power / n_t) * np.abs(np.conj(h_rows) @ precoders.T) ** 2
    signal = np.diag(gains)
    interference = gains.sum(axis=1) - signal
    return np.log2(1.0 + signal / (1.0 + interference))


def highsnr_from_sin(sin_theta: float) -> float:
    """-2 log2(sin theta), saturated at SATURATION_RATE."""
    if sin_theta <= 2.0 ** (-SATURATION_RATE / 2.0):
        return SATURATION_RATE
    return min(-2.0 * math.log2(sin_theta), SATURATION_RATE)


def mutual_info_highsnr(shape: np.ndarray, w_k: np.ndarray, interferers) -> float:
    """
    High-SNR mutual information log2(1 + cos^2 theta / sum_j cos^2 phi_j).

    {w_k} plus the interferers must be a full orthonormal basis; then the value
    equals -2 log2(sin theta).
    """
    shape = np.asarray(shape, dtype=complex)
    basis = np.vstack([np.asarray(w_k, dtype=complex)[None, :]] + [np.asarray(w, dtype=complex)[None, :] for w in interferers])
    if basis.shape[0] != shape.shape[0]:
        raise DimensionError(
            f"high-SNR form needs a full basis of {shape.shape[0]} precoders (got {basis.shape[0]})"
        )
    gram = basis.conj() @ basis.T
    if not np.allclose(gram, np.eye(basis.shape[0]), atol=INPUT_TOL):
        raise NormalizationError("precoder set is not orthonormal")
    cos2 = np.abs(basis.conj() @ shape) ** 2
    leak = float(cos2[1:].sum())
    if leak <= 0.0:
        return SATURATION_RATE
    return float(min(math.log2(1.0 + cos2[0] / leak), SATURATION_RATE))


def rate_bounds(sin_istar: float, delta: float) -> tuple[float, float]:
    """-2 log2(sqrt(delta) + sin) <= rate <= -2 log2(sin)."""
    _check_open_unit("delta", delta)
    arg = math.sqrt(delta) + sin_istar
    lower = 0.0 if arg >= 1.0 else -2.0 * math.log2(arg)
    return lower, highsnr_from_sin(sin_istar)


def classify_regime(c_fb: float, power: float, n_t: int, n_n: int) -> str:
    """Interference-limited while C_fb < (n_T - 1) log2 P + log2 N_n, noise-limited beyond."""
    boundary = (n_t - 1) * math.log2(power) + math.log2(n_n)
    return INTERFERENCE_LIMITED if c_fb < boundary else NOISE_LIMITED


def predicted_goodput_order(c_fb: float, power: float, n_t: int, eps: float, n_n: int) -> float:
    """
    Scaling order of the goodput: n_T (1 - eps) / (n_T - 1) (C_fb - log2 N_n) when
    interference-limited, n_T (1 - eps) log2 P when noise-limited.
    """
    if classify_regime(c_fb, power, n_t, n_n) == INTERFERENCE_LIMITED:
        return n_t * (1.0 - eps) / (n_t - 1) * (c_fb - math.log2(n_n))
    return n_t * (1.0 - eps) * math.log2(power)


def sin_istar_lower_bound(n_n: int, n: int, n_t: int) -> float:
    """Lower bound (N_n / N)^(1 / (2 (n_T - 1))) on the mean worst-neighbour sine."""
    return (n_n / n) ** (1.0 / (2 * (n_t - 1)))
