"""Write and read run manifests (<run dir>/manifest.json).

A manifest holds everything needed to rerun a run exactly (experiment id, the
resolved config and sweep, the seed) plus provenance: package version, UTC
start time, wall time, worker count and the SHA-256 of every file written.
"""

import hashlib
import json
import math
from pathlib import Path
from typing import Any

from sdma import __version__

MANIFEST_NAME = "manifest.json"


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(Path(path), "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _json_safe(value: Any) -> Any:
    """NaN and infinities become null; JSON has no spelling for them."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_manifest(
    run_dir: str | Path,
    *,
    spec: dict[str, Any],
    started_at: str,
    wall_time_s: float,
    workers: int,
    files: list[str | Path],
    summary: dict[str, Any] | None = None,
    description: str = "",
) -> Path:
    """
    Write manifest.json into ``run_dir``. ``files`` are paths inside the run
    directory; they are recorded relative to it, in the order given.
    """
    run_dir = Path(run_dir)
    entries = []
    for path in files:
        path = Path(path)
        entries.append({"path": path.relative_to(run_dir).as_posix(), "sha256": file_digest(path)})
    manifest = {
        "experiment": spec["experiment"],
        "seed": spec["config"]["seed"],
        "version": __version__,
        "started_at": started_at,
        "wall_time_s": round(wall_time_s, 3),
        "workers": workers,
        "spec": spec,
        "summary": summary or {},
        "description": description,
        "files": entries,
    }
    manifest_path = run_dir / MANIFEST_NAME
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(_json_safe(manifest), f, indent=2, ensure_ascii=False)
    return manifest_path


def load_manifest(run_dir: str | Path) -> dict[str, Any]:
    with open(Path(run_dir) / MANIFEST_NAME, encoding="utf-8") as f:
        return json.load(f)


def verify_manifest(run_dir: str | Path) -> list[str]:
    """Paths whose current digest differs from the manifest (missing files included)."""
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    changed = []
    for entry in manifest.get("files", []):
        path = run_dir / entry["path"]
        if not path.exists() or file_digest(path) != entry["sha256"]:
            changed.append(entry["path"])
    return changed
