"""Small hand-checkable inputs for the rate table.

The worked example is a four-codeword codebook whose angles to v_0 have sines
(0, 0.5, 0.4, 1), with column 0 of P_CSIT equal to (0.70, 0.10, 0.11, 0.09) and
eps = 0.1. Its expected row 0: ns_set {0, 2, 1}, eps_res 0.01, rate 0.606
(0.983 when i_star is read as the most likely neighbour).
"""

import math

import numpy as np

from sdma.codebook import Codebook, build_codebook, codebook_from_entries
from sdma.feedback_channel import TransitionMatrix

WORKED_EXAMPLE_EPS = 0.1
WORKED_EXAMPLE_DELTA = 0.1
WORKED_EXAMPLE_N_T = 4


def worked_example_codebook() -> Codebook:
    entries = np.zeros((4, 4), dtype=complex)
    entries[0, 0] = 1.0
    entries[1, :2] = [math.sqrt(0.75), 0.5]
    entries[2, [0, 2]] = [math.sqrt(0.84), 0.4]
    entries[3, 3] = 1.0
    return codebook_from_entries(entries, n_t=WORKED_EXAMPLE_N_T, c_fb=2)


def worked_example_transition() -> TransitionMatrix:
    """Symmetric, doubly stochastic P_CSIT whose column 0 is the worked example."""
    return TransitionMatrix(
        probs=np.array(
            [
                [0.70, 0.10, 0.11, 0.09],
                [0.10, 0.70, 0.09, 0.11],
                [0.11, 0.09, 0.70, 0.10],
                [0.09, 0.11, 0.10, 0.70],
            ]
        )
    )


def identity_example(n_t: int = 4, c_fb: int = 4, seed: int = 0) -> tuple[Codebook, TransitionMatrix]:
    """A random codebook with noiseless feedback (P_CSIT = I)."""
    cb = build_codebook(np.random.default_rng(seed), n_t, c_fb, seed=seed)
    return cb, TransitionMatrix(probs=np.eye(cb.size))
