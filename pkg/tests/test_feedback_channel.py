import numpy as np
import pytest
from scipy.stats import chisquare, norm

from sdma.errors import ConfigurationError, DimensionError
from sdma.feedback_channel import (
    IndexMapping,
    TransitionMatrix,
    csit_transition,
    feedback_transition,
    gray_code,
    gray_decode,
    greedy_mass_set,
    kron_transition,
    neighbor_set,
    parametric_nn_transition,
    psk_constellation,
    psk_transition_matrix,
    psk_transition_matrix_mc,
    symbol_error_rate,
    transmit_index,
    transmit_indices,
)


def test_psk_constellation_points():
    c = psk_constellation(8)
    assert c.order == 8 and c.bits == 3
    assert np.allclose(np.abs(c.points), 1.0)
    assert c.points[2] == pytest.approx(1j)


def test_constellation_order_must_be_power_of_two():
    with pytest.raises(ConfigurationError):
        psk_constellation(6)


def test_bpsk_crossover_at_zero_db():
    p = psk_transition_matrix(2, 0.0)
    assert p[0, 1] == pytest.approx(norm.sf(np.sqrt(2.0)), abs=1e-6)
    assert p[0, 1] == pytest.approx(0.0786, abs=1e-4)


def test_psk_matrix_is_row_stochastic_and_circulant():
    p = psk_transition_matrix(16, 7.0)
    assert np.allclose(p.probs.sum(axis=1), 1.0, atol=1e-9)
    for k in range(16):
        assert np.allclose(p.probs[k], np.roll(p.probs[0], k))
    # symmetric around the sent point
    assert p[0, 1] == pytest.approx(p[0, 15], rel=1e-6)
    assert p[0, 1] > p[0, 2]


def test_psk_matrix_tends_to_identity_at_high_snr():
    p = psk_transition_matrix(4, 40.0)
    assert np.allclose(p.probs, np.eye(4), atol=1e-9)


def test_psk_matrix_rejects_non_finite_snr():
    with pytest.raises(ConfigurationError):
        psk_transition_matrix(4, float("inf"))


def test_quadrature_agrees_with_monte_carlo():
    exact = psk_transition_matrix(4, 5.0)
    estimate = psk_transition_matrix_mc(4, 5.0, 200_000, np.random.default_rng(3))
    assert np.allclose(estimate.probs, exact.probs, atol=0.01)


def test_8psk_neighbour_set_at_10db():
    p = psk_transition_matrix(8, 10.0)
    members, n_n = neighbor_set(p, 0, 0.03)
    assert n_n == 3
    assert sorted(members) == [0, 1, 7]


def test_nearest_neighbor_model():
    p = parametric_nn_transition(8, 0.2)
    assert p[3, 3] == pytest.approx(0.8)
    assert p[3, 2] == pytest.approx(0.1) and p[3, 4] == pytest.approx(0.1)
    assert p[0, 7] == pytest.approx(0.1)
    assert symbol_error_rate(p) == pytest.approx(0.2)
    bpsk = parametric_nn_transition(2, 0.1)
    assert np.allclose(bpsk.probs, [[0.9, 0.1], [0.1, 0.9]])


def test_nearest_neighbor_model_rejects_bad_rates():
    with pytest.raises(ConfigurationError):
        parametric_nn_transition(8, 1.0)
    with pytest.raises(ConfigurationError):
        parametric_nn_transition(8, -0.1)


def test_transition_matrix_validation():
    with pytest.raises(ConfigurationError):
        TransitionMatrix(probs=np.array([[0.5, 0.4], [0.5, 0.5]]))
    with pytest.raises(DimensionError):
        TransitionMatrix(probs=np.ones((2, 3)) / 3)


def test_kron_transition_of_two_bpsk_symbols():
    bpsk = parametric_nn_transition(2, 0.1)
    p = kron_transition([bpsk, bpsk])
    assert p.size == 4
    assert p[0, 3] == pytest.approx(0.01)
    assert p[0, 0] == pytest.approx(0.81)
    assert feedback_transition("nearest-neighbor", 1, 2, ser=0.1).probs == pytest.approx(p.probs)


def test_feedback_transition_needs_its_parameter():
    with pytest.raises(ConfigurationError):
        feedback_transition("psk-awgn", 3)
    with pytest.raises(ConfigurationError):
        feedback_transition("rayleigh", 3, snr_db=5.0)


def test_csit_transition_permutes_rows_and_columns():
    p = psk_transition_matrix(8, 3.0)
    xi = IndexMapping.from_forward([3, 0, 7, 1, 6, 2, 5, 4])
    q = csit_transition(p, xi)
    for i in range(8):
        for j in range(8):
            assert q[i, j] == p[xi(i), xi(j)]
    with pytest.raises(DimensionError):
        csit_transition(p, IndexMapping.identity(4))


def test_index_mapping_inverse():
    xi = IndexMapping.from_forward([2, 0, 1])
    assert xi(0) == 2
    assert list(xi.inverse[xi.forward]) == [0, 1, 2]
    with pytest.raises(ConfigurationError):
        IndexMapping.from_forward([0, 0, 1])


def test_noiseless_link_delivers_every_index(rng):
    xi = IndexMapping.from_forward(rng.permutation(16))
    sent = rng.integers(0, 16, 1000)
    received = transmit_indices(sent, xi, TransitionMatrix(probs=np.eye(16)), rng)
    assert np.array_equal(received, sent)
    assert transmit_index(5, xi, TransitionMatrix(probs=np.eye(16)), rng) == 5


def test_link_error_frequency(rng):
    p = parametric_nn_transition(8, 0.2)
    received = transmit_indices(np.zeros(100_000, dtype=np.int64), IndexMapping.identity(8), p, rng)
    assert np.mean(received == 0) == pytest.approx(0.8, abs=0.0063)
    assert set(np.unique(received)) <= {0, 1, 7}


def test_errors_follow_the_mapping(rng):
    # codeword 0 sits on point 4, whose ring neighbours hold codewords 2 and 6
    xi = IndexMapping.from_forward([4, 0, 3, 1, 7, 2, 5, 6])
    received = transmit_indices(np.zeros(5000, dtype=np.int64), xi, parametric_nn_transition(8, 0.5), rng)
    assert set(np.unique(received)) == {0, 2, 6}


def test_greedy_mass_set():
    probs = np.array([0.05, 0.6, 0.2, 0.15])
    assert greedy_mass_set(probs, 1, 0.1) == [1, 2, 3]
    assert greedy_mass_set(probs, 0, 0.5) == [0, 1]
    with pytest.raises(ConfigurationError):
        greedy_mass_set(probs, 0, 1.5)


def test_gray_code_neighbours_differ_in_one_bit():
    for bits in (2, 3, 6):
        n = 2**bits
        labels = [gray_code(p) for p in range(n)]
        assert sorted(labels) == list(range(n))
        for p in range(n):
            assert bin(labels[p] ^ labels[(p + 1) % n]).count("1") == 1
            assert gray_decode(labels[p]) == p


def test_csit_transition_follows_a_relabeling():
    p = psk_transition_matrix(8, 3.0)
    xi = IndexMapping.from_forward([3, 0, 7, 1, 6, 2, 5, 4])
    sigma = np.array([5, 2, 0, 6, 1, 7, 4, 3])
    relabeled = IndexMapping.from_forward(xi.forward[sigma])
    q = csit_transition(p, xi).probs
    assert np.array_equal(csit_transition(p, relabeled).probs, q[np.ix_(sigma, sigma)])


def test_received_indices_follow_the_csit_row(rng):
    p = psk_transition_matrix(8, 0.0)
    xi = IndexMapping.from_forward([3, 0, 7, 1, 6, 2, 5, 4])
    row = csit_transition(p, xi)[5]
    trials = 20_000
    received = [transmit_index(5, xi, p, rng) for _ in range(trials)]
    observed = np.bincount(received, minlength=8)
    assert row.min() > 1e-3
    assert chisquare(observed, row / row.sum() * trials).pvalue > 1e-3
