import math

import numpy as np
import pytest
from scipy.stats import chisquare

from sdma.base_station import (
    INTERFERENCE_LIMITED,
    NOISE_LIMITED,
    SATURATION_RATE,
    build_rate_table,
    classify_regime,
    highsnr_from_sin,
    mutual_info_exact,
    mutual_info_highsnr,
    outage_bound,
    predicted_goodput_order,
    rate_bounds,
    schedule,
    sin_istar_lower_bound,
    slot_mutual_info,
)
from sdma.codebook import build_codebook, codebook_from_entries, gate_many
from sdma.core_math import (
    channel_from_vector,
    complex_gaussian,
    draw_channel,
    draw_channels,
    draw_orthonormal_basis,
)
from sdma.errors import ConfigurationError, DimensionError, NoFeedbackError, NormalizationError
from sdma.feedback_channel import TransitionMatrix, csit_transition, parametric_nn_transition
from sdma.fixtures import (
    WORKED_EXAMPLE_DELTA,
    WORKED_EXAMPLE_EPS,
    identity_example,
    worked_example_codebook,
    worked_example_transition,
)
from sdma.index_assignment import solve_mapping


def _worked_table(eps=WORKED_EXAMPLE_EPS, likely_istar=False):
    return build_rate_table(
        worked_example_transition(), worked_example_codebook(), WORKED_EXAMPLE_DELTA, eps, likely_istar=likely_istar
    )


@pytest.fixture
def robust_table(codebook16):
    p_ch = parametric_nn_transition(16, 0.2)
    xi = solve_mapping("cnna", codebook16, np.ones(16) / 16, p_ch, np.random.default_rng(0))
    return build_rate_table(csit_transition(p_ch, xi), codebook16, 0.1, 0.05)


# rate table


def test_worked_example_row():
    row = _worked_table()[0]
    assert row.ns_set == (0, 2, 1)
    assert row.i_star == 1
    assert row.sin_istar == pytest.approx(0.5, abs=1e-12)
    assert row.eps_res == pytest.approx(0.01, abs=1e-12)
    assert row.rate == pytest.approx(0.606, abs=1e-3)


def test_worked_example_with_most_likely_neighbour_as_i_star():
    row = _worked_table(likely_istar=True)[0]
    assert row.ns_set == (0, 2, 1)
    assert row.i_star == 2
    assert row.rate == pytest.approx(0.983, abs=1e-3)


def test_noiseless_link_rates():
    cb, identity = identity_example(n_t=4, c_fb=4, seed=1)
    table = build_rate_table(identity, cb, 0.1, 0.05)
    assert len(table) == 16
    for row in table.rows:
        assert row.ns_set == (row.index,)
        assert row.i_star == row.index
        assert row.rate == pytest.approx(3.345, abs=2e-3)
        expected = -2.0 * math.log2(math.sqrt(0.1) * 0.95 ** (1.0 / 6.0))
        assert row.rate == pytest.approx(expected, abs=1e-12)


def test_table_rows_satisfy_the_neighbour_set_conditions(robust_table):
    for row in robust_table.rows:
        assert row.ns_set[0] == row.index
        assert row.i_star in row.ns_set
        mass = 1.0 - row.tail
        assert mass >= 1.0 - robust_table.eps - 1e-12
        assert mass - row.p_istar < 1.0 - robust_table.eps
        assert 0.0 <= row.eps_res < row.p_istar
        assert row.rate >= 0.0


def test_outage_bound_inverts_the_rate(robust_table):
    for row in robust_table.rows:
        if row.rate > 0.0:
            assert outage_bound(row.rate, row.index, robust_table) == pytest.approx(robust_table.eps, abs=1e-9)
            assert outage_bound(0.0, row.index, robust_table) <= robust_table.eps + 1e-12


def test_outage_bound_of_worked_example():
    table = _worked_table()
    assert outage_bound(table[0].rate, 0, table) == pytest.approx(0.1, abs=1e-9)


def test_outage_bound_is_monotone_in_rate(robust_table):
    rates = np.linspace(0.0, 6.0, 61)
    for index in (0, 5, 11):
        bounds = [outage_bound(r, index, robust_table) for r in rates]
        assert all(b >= a - 1e-15 for a, b in zip(bounds, bounds[1:]))


def test_looser_target_gives_higher_rates_on_the_worked_example():
    rates = [_worked_table(eps)[0].rate for eps in (0.1, 0.12, 0.15, 0.2, 0.3)]
    assert all(b >= a for a, b in zip(rates, rates[1:]))
    assert _worked_table(0.2)[0].ns_set == (0, 2)
    assert _worked_table(0.3)[0].ns_set == (0,)


def test_looser_target_on_a_noiseless_link():
    cb, identity = identity_example(seed=2)
    low = build_rate_table(identity, cb, 0.1, 0.01).rates
    high = build_rate_table(identity, cb, 0.1, 0.2).rates
    assert np.all(high >= low)


def test_rate_table_rejects_bad_parameters(codebook16):
    identity = TransitionMatrix(probs=np.eye(16))
    with pytest.raises(ConfigurationError):
        build_rate_table(identity, codebook16, 0.1, 1.5)
    with pytest.raises(ConfigurationError):
        build_rate_table(identity, codebook16, 0.0, 0.05)
    with pytest.raises(DimensionError):
        build_rate_table(TransitionMatrix(probs=np.eye(4)), codebook16, 0.1, 0.05)


def test_rate_table_rejects_a_column_without_mass():
    cb = codebook_from_entries(np.eye(2, dtype=complex), n_t=2, c_fb=1)
    stuck = TransitionMatrix(probs=np.array([[1.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(ConfigurationError, match="row 1"):
        build_rate_table(stuck, cb, 0.1, 0.05)


def test_noiseless_conditional_outage_stays_within_target():
    """Served on its own codeword at high SNR, a gated user is in outage at most eps of the time."""
    cb, identity = identity_example(n_t=4, c_fb=4, seed=5)
    eps = 0.05
    table = build_rate_table(identity, cb, 0.1, eps)
    rng = np.random.default_rng(17)
    outages = served = 0
    for _ in range(2):
        h, gains, shapes = draw_channels(rng, 4, 100_000)
        feed, idx = gate_many(gains, shapes, cb, 0.1, 2.0)
        h, idx = h[feed], idx[feed]
        sets = np.array([cb.set_members(cb.set_of(i)) for i in idx], dtype=np.int64)
        gains_k = (1e6 / 4) * np.abs(np.einsum("ukn,un->uk", cb.entries[sets].conj(), h)) ** 2
        own = sets == idx[:, None]
        signal = gains_k[own]
        mi = np.log2(1.0 + signal / (1.0 + gains_k.sum(axis=1) - signal))
        outages += int(np.sum(table.rates[idx] >= mi))
        served += idx.shape[0]
    assert served > 1000
    assert outages / served <= eps + 3.0 * math.sqrt(eps * (1 - eps) / served)


# scheduling


@pytest.fixture
def two_by_two():
    """n_T = 2 with four codewords: sets {0, 1} and {2, 3}."""
    return build_codebook(np.random.default_rng(4), 2, 2)


def test_schedule_picks_the_complete_set(two_by_two, rng):
    outcome = schedule({10: 2, 11: 3}, two_by_two, rng)
    assert outcome.chosen_set == 1
    assert outcome.unfilled_slots == 0
    assert sorted((a.user, a.index) for a in outcome.assignments) == [(10, 2), (11, 3)]
    for a in outcome.assignments:
        assert np.array_equal(a.precoder, two_by_two.entries[a.index])


def test_schedule_is_uniform_over_complete_sets(two_by_two):
    rng = np.random.default_rng(0)
    picks = [schedule({0: 0, 1: 1, 2: 2, 3: 3}, two_by_two, rng).chosen_set for _ in range(10_000)]
    assert np.mean(picks) == pytest.approx(0.5, abs=0.025)


def test_schedule_is_uniform_over_reporting_users(two_by_two):
    rng = np.random.default_rng(1)
    chosen = []
    for _ in range(4000):
        outcome = schedule({5: 0, 6: 0, 8: 0, 9: 0, 7: 1}, two_by_two, rng)
        chosen.append(next(a.user for a in outcome.assignments if a.index == 0))
    counts = np.array([chosen.count(u) for u in (5, 6, 8, 9)])
    assert counts.sum() == 4000
    assert chisquare(counts).pvalue > 1e-3


def test_schedule_falls_back_to_the_best_covered_set(two_by_two, rng):
    outcome = schedule({0: 0, 1: 2}, two_by_two, rng)
    assert outcome.chosen_set == 0
    assert len(outcome.assignments) == 1
    assert outcome.unfilled_slots == 1


def test_schedule_needs_feedback(two_by_two, rng):
    with pytest.raises(NoFeedbackError):
        schedule({}, two_by_two, rng)


def test_scheduled_precoders_are_orthogonal(codebook16, rng):
    received = {u: int(rng.integers(16)) for u in range(60)}
    outcome = schedule(received, codebook16, rng)
    idx = [a.index for a in outcome.assignments]
    for i in idx:
        for j in idx:
            if i != j:
                assert codebook16.pairwise_sin[i, j] == pytest.approx(1.0, abs=1e-9)


# mutual information


def test_exact_mutual_information_examples():
    w = np.array([1, 0, 0, 0], dtype=complex)
    aligned = channel_from_vector(w)
    assert mutual_info_exact(aligned, w, [], 4.0, 4) == pytest.approx(1.0)
    orthogonal = channel_from_vector(np.array([0, 1, 0, 0], dtype=complex))
    assert mutual_info_exact(orthogonal, w, [], 4.0, 4) == pytest.approx(0.0)
    with pytest.raises(NormalizationError):
        mutual_info_exact(aligned, 2 * w, [], 4.0, 4)


def test_slot_mutual_info_matches_the_scalar_form(rng):
    basis = draw_orthonormal_basis(rng, 4).vectors
    users = [draw_channel(rng, 4) for _ in range(4)]
    vector = slot_mutual_info(np.vstack([u.h for u in users]), basis, 100.0, 4)
    for k, u in enumerate(users):
        others = [basis[j] for j in range(4) if j != k]
        assert vector[k] == pytest.approx(mutual_info_exact(u, basis[k], others, 100.0, 4), rel=1e-12)


def test_high_snr_form_examples():
    e = np.eye(4, dtype=complex)
    assert mutual_info_highsnr(e[0], e[0], e[1:]) == SATURATION_RATE
    shape = np.array([math.sqrt(0.75), 0.5, 0, 0], dtype=complex)
    assert mutual_info_highsnr(shape, e[0], e[1:]) == pytest.approx(2.0, abs=1e-12)
    assert highsnr_from_sin(0.5) == pytest.approx(2.0)
    assert highsnr_from_sin(0.0) == SATURATION_RATE


def test_high_snr_form_equals_minus_two_log_sine(rng):
    for _ in range(100):
        basis = draw_orthonormal_basis(rng, 4).vectors
        shape = draw_channel(rng, 4).shape
        sin_theta = math.sqrt(1.0 - abs(np.vdot(basis[0], shape)) ** 2)
        assert mutual_info_highsnr(shape, basis[0], basis[1:]) == pytest.approx(
            -2.0 * math.log2(sin_theta), abs=1e-9
        )


def test_high_snr_form_needs_a_full_orthonormal_basis(rng):
    basis = draw_orthonormal_basis(rng, 4).vectors
    shape = draw_channel(rng, 4).shape
    with pytest.raises(DimensionError):
        mutual_info_highsnr(shape, basis[0], basis[1:3])
    skewed = basis.copy()
    skewed[1] = (basis[0] + basis[1]) / math.sqrt(2.0)
    with pytest.raises(NormalizationError):
        mutual_info_highsnr(shape, skewed[0], skewed[1:])


def test_high_snr_form_tracks_the_exact_one_at_40db(rng):
    errors = []
    while len(errors) < 500:
        basis = draw_orthonormal_basis(rng, 4).vectors
        h = draw_channel(rng, 4)
        leak = float(np.sum(np.abs(basis[1:].conj() @ h.shape) ** 2))
        if leak <= 0.05 or h.gain <= 1.0:
            continue
        exact = mutual_info_exact(h, basis[0], basis[1:], 1e4, 4)
        errors.append(abs(mutual_info_highsnr(h.shape, basis[0], basis[1:]) - exact))
    assert max(errors) < 0.2


# scaling helpers


def test_rate_bounds():
    lower, upper = rate_bounds(0.5, 0.1)
    assert lower == pytest.approx(-2.0 * math.log2(math.sqrt(0.1) + 0.5))
    assert upper == pytest.approx(2.0)
    assert rate_bounds(0.9, 0.1)[0] == 0.0


def test_regimes_and_predicted_order():
    assert classify_regime(4, 100.0, 4, 3) == INTERFERENCE_LIMITED
    assert classify_regime(8, 1.0, 4, 3) == NOISE_LIMITED
    assert predicted_goodput_order(4, 100.0, 4, 0.05, 1) == pytest.approx(4 * 0.95 / 3 * 4)
    assert predicted_goodput_order(8, 1.0, 4, 0.05, 1) == pytest.approx(0.0)


def test_worst_neighbour_sine_bound():
    assert sin_istar_lower_bound(3, 64, 4) == pytest.approx(0.600, abs=1e-3)


def _cap_outage(cb, sent, received, rate, delta, samples, rng):
    """
    Fraction of users quantized to ``sent`` (sin^2 <= delta) whose high-SNR
    capacity -2 log2 sin(h, v_received) does not exceed ``rate``.
    """
    v = cb.entries[sent]
    n_t = cb.n_t
    outages = kept = 0
    while kept < samples:
        sin2 = delta * rng.random(samples) ** (1.0 / (n_t - 1))
        w = complex_gaussian(rng, (samples, n_t))
        w -= np.outer(w @ v.conj(), v)
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        h = np.sqrt(1.0 - sin2)[:, None] * v + np.sqrt(sin2)[:, None] * w
        own = np.argmax(np.abs(h @ cb.entries.conj().T), axis=1) == sent
        sin_rx = np.sqrt(np.clip(1.0 - np.abs(h[own] @ cb.entries[received].conj()) ** 2, 0.0, 1.0))
        outages += int(np.sum(rate >= -2.0 * np.log2(sin_rx)))
        kept += int(own.sum())
    return outages / kept, kept


@pytest.mark.slow
@pytest.mark.parametrize("likely_istar", [False, True])
def test_worked_example_conditional_outage(likely_istar):
    cb = worked_example_codebook()
    table = _worked_table(likely_istar=likely_istar)
    rate = table[0].rate
    posterior = worked_example_transition().probs[:, 0]
    rng = np.random.default_rng(23)
    per = kept = 0
    for sent, weight in enumerate(posterior):
        frac, n = _cap_outage(cb, sent, 0, rate, WORKED_EXAMPLE_DELTA, 20_000, rng)
        per += weight * frac
        kept = n if not kept else min(kept, n)
    eps = WORKED_EXAMPLE_EPS
    # the orthogonal codeword v_3 is always in outage, v_0 and v_2 never are
    assert per >= posterior[3] - 1e-12
    assert per <= eps + 3.0 * math.sqrt(eps * (1 - eps) / kept)
    if not likely_istar:
        assert per == pytest.approx(posterior[3], abs=1e-12)
