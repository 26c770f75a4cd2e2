"""Per-slot Monte Carlo of the limited-feedback downlink and goodput averaging.

A scheme is prebuilt once per configuration (codebook, index mapping, link and
rate table) and then shared read-only by every trial. Trial t draws from
``default_rng([seed, 1, t])`` so results do not depend on how trials are split
across worker processes.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from sdma.base_station import RateTable, build_rate_table, schedule, slot_mutual_info
from sdma.codebook import Codebook, build_codebook, codeword_priors, gate_many
from sdma.config import SimConfig
from sdma.core_math import draw_channels
from sdma.errors import ConfigurationError
from sdma.feedback_channel import (
    IndexMapping,
    TransitionMatrix,
    csit_transition,
    feedback_transition,
    transmit_indices,
)
from sdma.hamming import HammingFeedbackLink, coded_link, hamming_payload_bits
from sdma.index_assignment import solve_mapping

logger = logging.getLogger(__name__)

# Stream tags for default_rng([seed, tag, ...]).
_TAG_CODEBOOK = 0
_TAG_TRIAL = 1
_TAG_PRIORS = 2
_TAG_MAPPING = 3


@dataclass(frozen=True, eq=False)
class Scheme:
    """Everything a trial needs that does not change from slot to slot."""

    name: str
    codebook: Codebook
    mapping: IndexMapping
    p_ch: TransitionMatrix
    p_csit_design: TransitionMatrix
    rate_table: RateTable
    rates: np.ndarray
    link: HammingFeedbackLink | None = None


@dataclass(frozen=True, eq=False)
class SlotRecord:
    users: np.ndarray
    indices: np.ndarray
    rates: np.ndarray
    mutual_info: np.ndarray
    goodput: np.ndarray
    unfilled_slots: int
    fed_back: int

    @property
    def outage(self) -> np.ndarray:
        return self.rates >= self.mutual_info

    @property
    def scheduled(self) -> int:
        return int(self.users.shape[0])

    @property
    def total_rate(self) -> float:
        return float(self.rates.sum())

    @property
    def total_goodput(self) -> float:
        return float(self.goodput.sum())

    @property
    def rate_lost(self) -> float:
        return float(self.rates[self.outage].sum())


@dataclass(frozen=True)
class GoodputSummary:
    mean_goodput: float
    stderr: float
    per: float
    mean_scheduled: float
    trials: int
    mean_rate: float
    filled_fraction: float
    packets: int = 0

    def per_within(self, eps: float, sigmas: float = 3.0) -> bool:
        """Realized PER <= eps + ``sigmas`` binomial standard errors over the scheduled packets."""
        return self.per <= per_limit(eps, self.packets, sigmas)


def per_limit(eps: float, packets: int, sigmas: float = 3.0) -> float:
    if packets <= 0:
        return 1.0
    return eps + sigmas * math.sqrt(eps * (1.0 - eps) / packets)


def _codebook_rng(cfg: SimConfig, c_fb: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, _TAG_CODEBOOK, c_fb])


def coded_payload_bits(cfg: SimConfig) -> int:
    b, n_symbols = cfg.symbol_layout()
    return hamming_payload_bits(b * n_symbols)


def build_scheme(cfg: SimConfig, scheme: str | None = None) -> Scheme:
    """
    Prebuild ``scheme`` (default cfg.scheme) for ``cfg``.

    All schemes of one configuration share the uncoded codebook, so paired runs
    compare like with like. The coded scheme quantizes with a smaller codebook
    of 2^k vectors, k being the Hamming payload that fits the symbol budget.
    """
    name = scheme or cfg.scheme
    b, n_symbols = cfg.symbol_layout()
    fb = cfg.feedback
    per_symbol = feedback_transition(fb.model, b, 1, snr_db=fb.snr_db, ser=fb.ser)

    if name == "naive-coded":
        link = coded_link(n_symbols, b, per_symbol)
        k = link.code.k
        cb = build_codebook(_codebook_rng(cfg, k), cfg.n_t, k, partial=True, seed=cfg.seed)
        identity = TransitionMatrix(probs=np.eye(cb.size))
        table = build_rate_table(identity, cb, cfg.delta, cfg.eps, cfg.n_t)
        logger.info("scheme %s: (%d,%d) Hamming code, %d codewords", name, link.code.n, k, cb.size)
        return Scheme(
            name=name,
            codebook=cb,
            mapping=IndexMapping.identity(cb.size),
            p_ch=per_symbol,
            p_csit_design=identity,
            rate_table=table,
            rates=table.rates,
            link=link,
        )

    cb = build_codebook(_codebook_rng(cfg, cfg.c_fb), cfg.n_t, cfg.c_fb, seed=cfg.seed)
    p_ch = per_symbol if n_symbols == 1 else feedback_transition(
        fb.model, b, n_symbols, snr_db=fb.snr_db, ser=fb.ser
    )
    if name == "robust":
        priors = codeword_priors(
            cb, cfg.delta, cfg.g_th, cfg.prior_samples, np.random.default_rng([cfg.seed, _TAG_PRIORS, cfg.c_fb])
        )
        mapping = solve_mapping(
            cfg.solver,
            cb,
            priors,
            p_ch,
            np.random.default_rng([cfg.seed, _TAG_MAPPING, cfg.c_fb]),
            random_start=cfg.random_start,
        )
        p_design = csit_transition(p_ch, mapping)
        table = build_rate_table(p_design, cb, cfg.delta, cfg.eps, cfg.n_t, likely_istar=cfg.likely_istar)
    elif name == "naive-uncoded":
        mapping = IndexMapping.identity(cb.size)
        p_design = TransitionMatrix(probs=np.eye(cb.size))
        table = build_rate_table(p_design, cb, cfg.delta, cfg.eps, cfg.n_t)
    else:
        raise ConfigurationError(f"unknown scheme {name!r}")
    logger.info("scheme %s: N=%d, mean table rate %.4f", name, cb.size, float(table.rates.mean()))
    return Scheme(
        name=name,
        codebook=cb,
        mapping=mapping,
        p_ch=p_ch,
        p_csit_design=p_design,
        rate_table=table,
        rates=table.rates,
    )


def scheme_feasible(cfg: SimConfig, scheme: str) -> bool:
    """False when the coded scheme has no Hamming code fitting the symbol budget."""
    return scheme != "naive-coded" or coded_payload_bits(cfg) >= 1


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, _TAG_TRIAL, trial_index])


def _empty_record(fed_back: int, n_t: int) -> SlotRecord:
    empty = np.zeros(0)
    return SlotRecord(
        users=np.zeros(0, dtype=np.int64),
        indices=np.zeros(0, dtype=np.int64),
        rates=empty,
        mutual_info=empty,
        goodput=empty,
        unfilled_slots=n_t,
        fed_back=fed_back,
    )


def run_trial(cfg: SimConfig, scheme: Scheme, rng: np.random.Generator) -> SlotRecord:
    """
    One scheduling slot: draw K channels, gate and quantize, send the indices
    over the noisy link, schedule one orthonormal set, adapt rates from the
    table and judge outage with the exact mutual information.
    """
    cb = scheme.codebook
    h, gains, shapes = draw_channels(rng, cfg.n_t, cfg.k_users)
    feed, idx = gate_many(gains, shapes, cb, cfg.delta, cfg.g_th)
    users = np.nonzero(feed)[0]
    if scheme.link is not None:
        received = scheme.link.send(idx[users], rng)
    else:
        received = transmit_indices(idx[users], scheme.mapping, scheme.p_ch, rng)
    if users.shape[0] == 0:
        return _empty_record(0, cfg.n_t)

    outcome = schedule(dict(zip(users.tolist(), received.tolist())), cb, rng)
    sched_users = np.array([a.user for a in outcome.assignments], dtype=np.int64)
    sched_idx = np.array([a.index for a in outcome.assignments], dtype=np.int64)
    precoders = np.vstack([a.precoder for a in outcome.assignments])
    rates = scheme.rates[sched_idx]
    mi = slot_mutual_info(h[sched_users], precoders, cfg.power, cfg.n_t)
    goodput = np.where(rates < mi, rates, 0.0)
    return SlotRecord(
        users=sched_users,
        indices=sched_idx,
        rates=rates,
        mutual_info=mi,
        goodput=goodput,
        unfilled_slots=outcome.unfilled_slots,
        fed_back=int(users.shape[0]),
    )


def average_goodput(records: Sequence[SlotRecord]) -> GoodputSummary:
    """Mean per-slot goodput, its standard error and the realized PER."""
    if not records:
        raise ConfigurationError("average_goodput needs at least one slot record")
    per_slot = np.array([r.total_goodput for r in records])
    n = per_slot.shape[0]
    stderr = float(per_slot.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    scheduled = sum(r.scheduled for r in records)
    outages = sum(int(r.outage.sum()) for r in records)
    n_t = records[0].scheduled + records[0].unfilled_slots
    return GoodputSummary(
        mean_goodput=float(per_slot.mean()),
        stderr=stderr,
        per=outages / scheduled if scheduled else 0.0,
        mean_scheduled=scheduled / n,
        trials=n,
        mean_rate=float(np.mean([r.total_rate for r in records])),
        filled_fraction=scheduled / (n * n_t) if n_t else 0.0,
        packets=scheduled,
    )


def _run_chunk(cfg: SimConfig, scheme: Scheme, seed: int, start: int, stop: int) -> list[SlotRecord]:
    return [run_trial(cfg, scheme, trial_rng(seed, t)) for t in range(start, stop)]


def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def run_trials(
    cfg: SimConfig,
    scheme: Scheme,
    trials: int | None = None,
    *,
    workers: int | None = None,
    seed: int | None = None,
    progress: Callable[[int, int], None] | None = None,
    chunk_size: int = 250,
) -> list[SlotRecord]:
    """
    Run ``trials`` slots (default cfg.trials), in a process pool when
    ``workers`` > 1. Records come back in trial order whatever the pool does.
    """
    trials = cfg.trials if trials is None else int(trials)
    workers = cfg.workers if workers is None else int(workers)
    seed = cfg.seed if seed is None else int(seed)
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1 (got {trials})")
    chunks = _chunks(trials, chunk_size)
    results: list[list[SlotRecord] | None] = [None] * len(chunks)
    done = 0

    if workers <= 1:
        for i, (start, stop) in enumerate(chunks):
            results[i] = _run_chunk(cfg, scheme, seed, start, stop)
            done += stop - start
            if progress:
                progress(done, trials)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cfg, scheme, seed, start, stop) for start, stop in chunks]
            for i, future in enumerate(futures):
                results[i] = future.result()
                done += chunks[i][1] - chunks[i][0]
                if progress:
                    progress(done, trials)

    return [record for chunk in results for record in chunk]


def simulate_scheme(
    cfg: SimConfig,
    scheme: str,
    *,
    progress: Callable[[int, int], None] | None = None,
) -> GoodputSummary:
    """Build ``scheme`` for ``cfg`` and average cfg.trials slots of it."""
    built = build_scheme(cfg, scheme)
    return average_goodput(run_trials(cfg, built, progress=progress))
