"""Remove run directories under the results root to restore a clean slate."""

import argparse
import shutil
import sys
from pathlib import Path

# Allow importing sdma when run from project root or from utils/
_project_root = Path(__file__).resolve().parent.parent
if str(_project_root) not in sys.path:
    sys.path.insert(0, str(_project_root))

from sdma.output_paths import list_runs, results_root  # noqa: E402


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description="Delete run directories.")
    ap.add_argument("--root", help="results root (default: $SDMA_RESULTS_ROOT or ./results)")
    ap.add_argument("--experiment", help="only runs of this experiment")
    ap.add_argument("-y", "--yes", action="store_true", help="do not ask for confirmation")
    args = ap.parse_args(argv)

    root = results_root(args.root)
    runs = [r for r in list_runs(root) if not args.experiment or r.parent.name == args.experiment]
    if not runs:
        print(f"Nothing to clean: no run directories under {root}.")
        return

    print("This will delete:")
    for path in runs:
        print(f"  - {path}/")
    print()
    if not args.yes:
        response = input("Continue? [y/N] ").strip().lower()
        if response != "y":
            print("Aborted.")
            return

    for path in runs:
        shutil.rmtree(path)
        print(f"Removed {path}/")
        parent = path.parent
        if parent.exists() and not any(parent.iterdir()):
            parent.rmdir()

    print("Done. Clean slate restored.")


if __name__ == "__main__":
    main()
