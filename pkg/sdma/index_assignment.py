"""Robust index assignment.

The expected feedback distortion of a mapping xi is reduced, for one N-PSK
symbol with nearest-constellation errors, to the length of a Hamiltonian cycle
over "virtual cities" (one per codeword). The cycle is solved with the circled
nearest neighbour construction (CNNA), 2-opt or exhaustive search, and read back
as xi: the k-th city of the tour goes to the k-th point of the PSK ring.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from sdma.codebook import Codebook
from sdma.errors import ComplexityError, ConfigurationError, DimensionError
from sdma.feedback_channel import (
    Constellation,
    IndexMapping,
    TransitionMatrix,
    csit_transition,
    symbol_error_rate,
)

logger = logging.getLogger(__name__)

SOLVERS = ("cnna", "two-opt", "exhaustive", "identity", "random")
EXHAUSTIVE_MAX_CITIES = 10
_TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class TspInstance:
    dist: np.ndarray

    def __post_init__(self) -> None:
        d = self.dist
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DimensionError(f"distance matrix must be square (got shape {d.shape})")
        if not np.allclose(d, d.T, rtol=0.0, atol=1e-12):
            raise ConfigurationError("distance matrix must be symmetric")
        if np.any(np.diag(d) != 0.0) or np.any(d < 0.0):
            raise ConfigurationError("distance matrix needs a zero diagonal and non-negative entries")

    @property
    def n_cities(self) -> int:
        return int(self.dist.shape[0])


@dataclass(frozen=True, eq=False)
class TourSolution:
    order: np.ndarray
    cost: float


def expected_distortion(
    xi: IndexMapping, priors: np.ndarray, p_ch: TransitionMatrix, cb: Codebook
) -> float:
    """sum_i sum_j Pr(v_i) P_ch[xi(i)][xi(j)] d(v_i, v_j)."""
    if not (xi.size == p_ch.size == cb.size == len(priors)):
        raise DimensionError("mapping, channel, codebook and priors must share one size")
    p_csit = csit_transition(p_ch, xi).probs
    d = cb.pairwise_sin**2
    return float(np.sum(np.asarray(priors)[:, None] * p_csit * d))


def build_tsp(cb: Codebook, priors: np.ndarray, p_e: float) -> TspInstance:
    """Dis(i, j) = P_e (Pr(v_i) d(v_i, v_j) + Pr(v_j) d(v_j, v_i)) / 2."""
    if len(priors) != cb.size:
        raise DimensionError(f"{len(priors)} priors for a codebook of {cb.size}")
    weighted = np.asarray(priors)[:, None] * cb.pairwise_sin**2
    dist = p_e * (weighted + weighted.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    return TspInstance(dist=dist)


def _check_permutation(order, n: int) -> np.ndarray:
    order = np.asarray(order, dtype=np.int64)
    if order.shape != (n,) or sorted(order.tolist()) != list(range(n)):
        raise ConfigurationError(f"tour must be a permutation of 0..{n - 1}")
    return order


def cycle_cost(order, inst: TspInstance) -> float:
    order = _check_permutation(order, inst.n_cities)
    return float(np.sum(inst.dist[order, np.roll(order, -1)]))


def _pole(inst: TspInstance) -> int:
    return int(np.argmax(inst.dist.sum(axis=1)))


def cnna(
    inst: TspInstance,
    start: int | None = None,
    rng: np.random.Generator | None = None,
) -> TourSolution:
    """
    Circled nearest neighbour tour: walk to the nearest unvisited city; among
    equally near candidates take the one with the least summed distance to the
    cities already visited. The cycle closes back at the start.

    ``start`` defaults to the pole (largest summed distance to all others); when
    ``rng`` is given and ``start`` is None the start is drawn at random.
    """
    n = inst.n_cities
    if start is None:
        start = int(rng.integers(n)) if rng is not None else _pole(inst)
    dist = inst.dist
    visited = np.zeros(n, dtype=bool)
    visited[start] = True
    # Running sum of distances from each city to the visited set.
    to_visited = dist[start].copy()
    order = [int(start)]
    current = int(start)
    for _ in range(n - 1):
        candidates = np.nonzero(~visited)[0]
        d = dist[current, candidates]
        nearest = d.min()
        tied = candidates[np.abs(d - nearest) <= _TIE_RTOL * max(nearest, 1e-300)]
        nxt = int(tied[np.argmin(to_visited[tied])]) if tied.size > 1 else int(tied[0])
        visited[nxt] = True
        to_visited += dist[nxt]
        order.append(nxt)
        current = nxt
    order_arr = np.asarray(order, dtype=np.int64)
    return TourSolution(order=order_arr, cost=cycle_cost(order_arr, inst))


def exhaustive_tsp(inst: TspInstance) -> TourSolution:
    """
    Globally optimal cycle by enumerating the (N-1)!/2 distinct tours that start
    at city 0; ties resolve to the lexicographically first tour.
    """
    n = inst.n_cities
    if n > EXHAUSTIVE_MAX_CITIES:
        raise ComplexityError(
            f"exhaustive search is limited to {EXHAUSTIVE_MAX_CITIES} cities ({n} requested)"
        )
    if n <= 3:
        order = np.arange(n, dtype=np.int64)
        return TourSolution(order=order, cost=cycle_cost(order, inst))

    tails = np.array(
        [p for p in itertools.permutations(range(1, n)) if p[0] < p[-1]], dtype=np.int64
    )
    tours = np.hstack([np.zeros((tails.shape[0], 1), dtype=np.int64), tails])
    costs = inst.dist[tours, np.roll(tours, -1, axis=1)].sum(axis=1)
    best = int(np.argmin(costs))
    return TourSolution(order=tours[best].copy(), cost=cycle_cost(tours[best], inst))


def two_opt(inst: TspInstance, initial: TourSolution) -> TourSolution:
    """Apply improving 2-edge exchanges until none is left."""
    n = inst.n_cities
    dist = inst.dist
    tour = _check_permutation(initial.order, n).copy()
    if n < 4:
        return TourSolution(order=tour, cost=cycle_cost(tour, inst))
    improved = True
    while improved:
        improved = False
        for i in range(n - 2):
            a, b = tour[i], tour[i + 1]
            for j in range(i + 2, n if i > 0 else n - 1):
                c, d = tour[j], tour[(j + 1) % n]
                delta = dist[a, c] + dist[b, d] - dist[a, b] - dist[c, d]
                if delta < -1e-15:
                    tour[i + 1 : j + 1] = tour[i + 1 : j + 1][::-1]
                    b = tour[i + 1]
                    improved = True
    cost = cycle_cost(tour, inst)
    if cost > initial.cost:
        return initial
    return TourSolution(order=tour, cost=cost)


def tour_to_mapping(tour: TourSolution, constellation: Constellation) -> IndexMapping:
    """Place the k-th city of the tour on the k-th point of the ring: xi^-1(k) = tour[k]."""
    order = np.asarray(tour.order, dtype=np.int64)
    if order.shape[0] != constellation.order:
        raise DimensionError(
            f"tour visits {order.shape[0]} cities but the constellation has {constellation.order} points"
        )
    forward = np.empty_like(order)
    forward[order] = np.arange(order.shape[0])
    return IndexMapping.from_forward(forward)


def mapping_to_tour(xi: IndexMapping, inst: TspInstance | None = None) -> TourSolution:
    order = xi.inverse.copy()
    cost = cycle_cost(order, inst) if inst is not None else float("nan")
    return TourSolution(order=order, cost=cost)


def random_mapping(n: int, rng: np.random.Generator) -> IndexMapping:
    return IndexMapping.from_forward(rng.permutation(n))


def solve_mapping(
    solver: str,
    cb: Codebook,
    priors: np.ndarray,
    p_ch: TransitionMatrix,
    rng: np.random.Generator,
    *,
    random_start: bool = False,
) -> IndexMapping:
    """Index mapping chosen by ``solver`` for the codebook under channel ``p_ch``."""
    n = cb.size
    if solver not in SOLVERS:
        raise ConfigurationError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    if p_ch.size != n:
        raise DimensionError(f"feedback channel has {p_ch.size} points for {n} codewords")
    if solver == "identity":
        return IndexMapping.identity(n)
    if solver == "random":
        return random_mapping(n, rng)

    # Scaling by P_e leaves the optimal tour unchanged; a noiseless link still gets a tour.
    p_e = symbol_error_rate(p_ch)
    inst = build_tsp(cb, priors, p_e if p_e > 0.0 else 1.0)
    if solver == "exhaustive":
        tour = exhaustive_tsp(inst)
    else:
        tour = cnna(inst, rng=rng if random_start else None)
        if solver == "two-opt":
            tour = two_opt(inst, tour)
    logger.debug("solver %s: N=%d tour cost %.6g", solver, n, tour.cost)
    forward = np.empty(n, dtype=np.int64)
    forward[tour.order] = np.arange(n)
    return IndexMapping.from_forward(forward)
