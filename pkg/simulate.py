"""Run one experiment from a spec file: CSV, manifest.json and report.html in a fresh run directory."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from sdma.config import ExperimentSpec, load_spec, sweep_cells
from sdma.csv_io import write_experiment_csv
from sdma.errors import ConfigurationError, OutputDirError, SimulationError, error_line
from sdma.experiments import run_experiment
from sdma.manifest import load_manifest, write_manifest
from sdma.output_paths import fresh_run_dir, results_root
from sdma.progress import ProgressBar
from sdma.report_html import render_report

logger = logging.getLogger(__name__)


def apply_overrides(
    spec: ExperimentSpec,
    *,
    seed: int | None = None,
    trials: int | None = None,
    workers: int | None = None,
    out: str | None = None,
) -> ExperimentSpec:
    """Command-line values win over the spec file."""
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if trials is not None:
        changes["trials"] = trials
    if workers is not None:
        changes["workers"] = workers
    config = spec.config.with_overrides(**changes) if changes else spec.config
    return replace(spec, config=config, output_dir=out or spec.output_dir)


def config_echo(spec: ExperimentSpec) -> dict:
    """What the CSV's first line records: the spec minus anything that does not change results."""
    data = spec.to_dict()
    data.pop("output_dir", None)
    data["config"].pop("workers", None)
    return data


def run(spec: ExperimentSpec, *, quiet: bool = False) -> Path:
    """Execute ``spec`` and return its run directory."""
    sweep_cells(spec.experiment, spec.config, spec.sweep)
    run_dir = fresh_run_dir(results_root(spec.output_dir), spec.experiment)
    if not quiet:
        print(f"Running {spec.experiment} (seed {spec.config.seed}) into {run_dir}")

    started_at = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    start = time.perf_counter()
    result = run_experiment(spec, progress=lambda label: ProgressBar(label, quiet=quiet))
    wall = time.perf_counter() - start

    try:
        csv_path = write_experiment_csv(run_dir / f"{spec.experiment}.csv", config_echo(spec), result.columns, result.rows)
        write_manifest(
            run_dir,
            spec=spec.to_dict(),
            started_at=started_at,
            wall_time_s=wall,
            workers=spec.config.workers,
            files=[csv_path],
            summary=result.summary,
            description=result.description,
        )
        render_report(run_dir, load_manifest(run_dir), result.columns, result.rows, result.description)
    except OSError as exc:
        raise OutputDirError(f"cannot write results into {run_dir}: {exc.strerror or exc}") from exc
    if not quiet:
        print(f"Wrote {csv_path.name}, manifest.json and report.html ({wall:.1f} s)")
    return run_dir


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("spec", help="experiment spec file (JSON)")
    ap.add_argument("--seed", type=int, help="master seed (overrides the spec)")
    ap.add_argument("--out", help="results root (default: $SDMA_RESULTS_ROOT or ./results)")
    ap.add_argument("--trials", type=int, help="trials per sweep cell")
    ap.add_argument("--workers", type=int, help="worker processes for the trial loop")
    ap.add_argument("--quiet", action="store_true", help="no progress output")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        spec = load_spec(args.spec)
        spec = apply_overrides(spec, seed=args.seed, trials=args.trials, workers=args.workers, out=args.out)
        run(spec, quiet=args.quiet)
    except SimulationError as exc:
        print(error_line(exc), file=sys.stderr)
        return 2 if isinstance(exc, ConfigurationError) else 1
    except Exception as exc:
        logger.debug("unexpected failure", exc_info=True)
        print(error_line(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
