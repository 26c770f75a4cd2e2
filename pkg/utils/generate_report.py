"""Regenerate report.html for existing run directories from their manifest and CSV.

    python utils/generate_report.py results/fig4-cfb-ser/run-001
    python utils/generate_report.py --all
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

# Allow importing sdma when run from project root or from utils/
_project_root = Path(__file__).resolve().parent.parent
if str(_project_root) not in sys.path:
    sys.path.insert(0, str(_project_root))

from sdma.csv_io import read_experiment_csv  # noqa: E402
from sdma.manifest import load_manifest, verify_manifest  # noqa: E402
from sdma.output_paths import list_runs, results_root  # noqa: E402
from sdma.report_html import render_report  # noqa: E402


def regenerate(run_dir: Path) -> Path:
    manifest = load_manifest(run_dir)
    changed = verify_manifest(run_dir)
    if changed:
        print(f"  warning: {', '.join(changed)} changed since the run was recorded")
    csv_path = run_dir / f"{manifest['experiment']}.csv"
    _, columns, rows = read_experiment_csv(csv_path)
    return render_report(run_dir, manifest, columns, rows, manifest.get("description", ""))


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description="Regenerate report.html for run directories.")
    ap.add_argument("runs", nargs="*", help="run directories")
    ap.add_argument("--all", action="store_true", help="every run under the results root")
    ap.add_argument("--root", help="results root (with --all)")
    args = ap.parse_args(argv)

    runs = [Path(r) for r in args.runs]
    if args.all:
        runs.extend(list_runs(results_root(args.root)))
    if not runs:
        print("No run directories given. Pass paths or --all.")
        return 1

    start = time.perf_counter()
    failures = 0
    for run_dir in runs:
        if not (run_dir / "manifest.json").exists():
            print(f"Skipping {run_dir}: no manifest.json")
            failures += 1
            continue
        print(f"Regenerating {run_dir / 'report.html'} ...")
        regenerate(run_dir)
    print(f"Done. {len(runs) - failures} report(s) in {time.perf_counter() - start:.2f}s.")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
