"""Where results go: <root>/<experiment>/run-NNN/, one fresh directory per run."""

import os
import re
from pathlib import Path

from sdma.errors import OutputDirError

RESULTS_ROOT_ENV = "SDMA_RESULTS_ROOT"
DEFAULT_RESULTS_ROOT = "results"
_RUN_DIR = re.compile(r"^run-(\d{3,})$")


def results_root(override: str | Path | None = None) -> Path:
    """``override`` if given, else $SDMA_RESULTS_ROOT, else ./results."""
    if override:
        return Path(override)
    return Path(os.environ.get(RESULTS_ROOT_ENV) or DEFAULT_RESULTS_ROOT)


def next_run_number(experiment_dir: Path) -> int:
    """One past the highest existing run-NNN under ``experiment_dir`` (1 when none)."""
    if not experiment_dir.exists():
        return 1
    numbers = [
        int(m.group(1))
        for child in experiment_dir.iterdir()
        if child.is_dir() and (m := _RUN_DIR.match(child.name))
    ]
    return max(numbers, default=0) + 1


def fresh_run_dir(root: str | Path, experiment: str) -> Path:
    """
    Create and return a new run directory. An existing directory is never
    reused, so earlier results are not overwritten.
    """
    experiment_dir = Path(root) / experiment
    try:
        experiment_dir.mkdir(parents=True, exist_ok=True)
        run_dir = experiment_dir / f"run-{next_run_number(experiment_dir):03d}"
        run_dir.mkdir()
    except OSError as exc:
        raise OutputDirError(f"cannot create a run directory under {experiment_dir}: {exc.strerror or exc}") from exc
    return run_dir


def list_runs(root: str | Path) -> list[Path]:
    """All run directories under ``root``, sorted by experiment then run number."""
    root = Path(root)
    if not root.exists():
        return []
    runs = []
    for experiment_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for child in experiment_dir.iterdir():
            m = _RUN_DIR.match(child.name)
            if child.is_dir() and m:
                runs.append((experiment_dir.name, int(m.group(1)), child))
    return [path for _, _, path in sorted(runs)]
