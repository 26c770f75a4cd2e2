"""Export the offline artifacts of a configuration: codebook, P_ch, mapping and rate table.

    python utils/export_artifacts.py configs/fig4-cfb-ser.json [--scheme robust] [--out results]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

# Allow importing sdma when run from project root or from utils/
_project_root = Path(__file__).resolve().parent.parent
if str(_project_root) not in sys.path:
    sys.path.insert(0, str(_project_root))

from sdma.codebook import save_codebook  # noqa: E402
from sdma.config import SCHEMES, load_spec  # noqa: E402
from sdma.csv_io import write_experiment_csv, write_mapping_csv, write_matrix_csv  # noqa: E402
from sdma.engine import build_scheme  # noqa: E402
from sdma.errors import SimulationError, error_line  # noqa: E402
from sdma.experiments import RATE_TABLE_COLUMNS, rate_table_rows  # noqa: E402
from sdma.output_paths import fresh_run_dir, results_root  # noqa: E402


def export(spec_path: str, scheme: str | None, out: str | None) -> Path:
    spec = load_spec(spec_path)
    cfg = spec.config
    built = build_scheme(cfg, scheme)
    run_dir = fresh_run_dir(results_root(out or spec.output_dir), "artifacts")
    echo = {"spec": str(spec_path), "scheme": built.name, "config": cfg.to_dict()}

    save_codebook(built.codebook, run_dir / "codebook.json")
    write_matrix_csv(run_dir / "p_ch.csv", built.p_ch)
    write_matrix_csv(run_dir / "p_csit_design.csv", built.p_csit_design)
    write_mapping_csv(run_dir / "mapping.csv", built.mapping)
    write_experiment_csv(run_dir / "rate_table.csv", echo, RATE_TABLE_COLUMNS, rate_table_rows(built.rate_table))
    return run_dir


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description="Export codebook, transition matrices, mapping and rate table.")
    ap.add_argument("spec", help="experiment spec file (JSON)")
    ap.add_argument("--scheme", choices=SCHEMES, help="scheme to build (default: the spec's)")
    ap.add_argument("--out", help="results root")
    args = ap.parse_args(argv)
    try:
        run_dir = export(args.spec, args.scheme, args.out)
    except SimulationError as exc:
        print(error_line(exc), file=sys.stderr)
        return 2
    print(f"Artifacts written to {run_dir}")
    for path in sorted(run_dir.iterdir()):
        print(f"  - {path.name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
