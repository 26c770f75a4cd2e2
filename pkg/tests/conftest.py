import sys
from pathlib import Path

import numpy as np
import pytest

_project_root = Path(__file__).resolve().parent.parent
if str(_project_root) not in sys.path:
    sys.path.insert(0, str(_project_root))

from sdma.codebook import build_codebook  # noqa: E402
from sdma.config import SimConfig  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(2010)


@pytest.fixture
def codebook16():
    """n_T = 4, C_fb = 4: four orthonormal sets."""
    return build_codebook(np.random.default_rng(7), 4, 4, seed=7)


@pytest.fixture
def small_config():
    """A configuration small enough for end-to-end runs inside the test suite."""
    return SimConfig(trials=40, prior_samples=10_000, k_users=40, seed=11)


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    root = tmp_path / "results"
    monkeypatch.setenv("SDMA_RESULTS_ROOT", str(root))
    return root
