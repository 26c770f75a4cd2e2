"""Print (and optionally save) a rate table for hand checking.

    python utils/dump_rate_table.py                       # worked example, row 0
    python utils/dump_rate_table.py --likely-istar         # same, i* read as the most likely neighbour
    python utils/dump_rate_table.py --fixture identity    # noiseless link, closed-form rates
    python utils/dump_rate_table.py --spec configs/rate-table-dump.json --csv table.csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

# Allow importing sdma when run from project root or from utils/
_project_root = Path(__file__).resolve().parent.parent
if str(_project_root) not in sys.path:
    sys.path.insert(0, str(_project_root))

from sdma.config import SimConfig, load_spec  # noqa: E402
from sdma.csv_io import write_experiment_csv  # noqa: E402
from sdma.errors import SimulationError, error_line  # noqa: E402
from sdma.experiments import ExperimentResult, experiment_rate_table_dump  # noqa: E402


def _format_row(row: dict) -> str:
    members = ",".join(row["ns_set"].split())
    return (
        f"I={row['index']:>3}  ns_set={{{members}}}  i_star={row['i_star']}  "
        f"eps_res={row['eps_res']:.6g}  rate={row['rate']:.4f}"
    )


def dump_rate_table(cfg: SimConfig, fixture: str = "none", csv_path: str | Path | None = None) -> ExperimentResult:
    """Rate table of ``fixture`` (or of cfg's scheme), also written to ``csv_path`` when given."""
    result = experiment_rate_table_dump(cfg, fixture)
    if csv_path:
        write_experiment_csv(csv_path, {"fixture": fixture, "config": cfg.to_dict()}, result.columns, result.rows)
    return result


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description="Dump a rate table.")
    ap.add_argument(
        "--fixture",
        choices=["worked-example", "identity", "none"],
        default=None,
        help="fixture to dump (default: worked-example, or none with --spec)",
    )
    ap.add_argument("--spec", help="experiment spec whose config to use (implies --fixture none unless given)")
    ap.add_argument("--likely-istar", action="store_true", help="read i* as the most likely neighbour")
    ap.add_argument("--rows", type=int, help="print only the first N rows")
    ap.add_argument("--csv", help="also write the table to this CSV file")
    args = ap.parse_args(argv)

    try:
        if args.spec:
            cfg = load_spec(args.spec).config
            fixture = args.fixture or "none"
        else:
            cfg = SimConfig()
            fixture = args.fixture or "worked-example"
        if args.likely_istar:
            cfg = cfg.with_overrides(likely_istar=True)
        result = dump_rate_table(cfg, fixture, args.csv)
    except SimulationError as exc:
        print(error_line(exc), file=sys.stderr)
        return 2

    print(result.description)
    rows = result.rows[: args.rows] if args.rows else result.rows
    for row in rows:
        print(_format_row(row))
    if args.csv:
        print(f"Wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
