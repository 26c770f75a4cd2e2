"""Render <run dir>/report.html from the manifest and the result rows."""

import math
from pathlib import Path
from typing import Any

import markdown
from jinja2 import Environment, FileSystemLoader, select_autoescape

REPORT_NAME = "report.html"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "n/a"
        return f"{value:.4g}"
    return str(value)


def description_html(text: str) -> str:
    """Markdown experiment description to HTML."""
    return markdown.markdown(text or "", extensions=["nl2br", "tables"], output_format="html5")


def render_report(
    run_dir: str | Path,
    manifest: dict[str, Any],
    columns: list[str],
    rows: list[dict[str, Any]],
    description: str = "",
) -> Path:
    templates_dir = Path(__file__).resolve().parent / "templates"
    env = Environment(loader=FileSystemLoader(templates_dir), autoescape=select_autoescape(["html"]))
    template = env.get_template("report.html")
    summary = manifest.get("summary") or {}
    context = {
        "title": f"{manifest['experiment']} run",
        "experiment": manifest["experiment"],
        "seed": manifest.get("seed"),
        "version": manifest.get("version"),
        "started_at": manifest.get("started_at"),
        "wall_time_s": manifest.get("wall_time_s"),
        "workers": manifest.get("workers"),
        "description_html": description_html(description),
        "summary": [(k, _cell(v) if not isinstance(v, list) else ", ".join(_cell(x) for x in v)) for k, v in summary.items()],
        "columns": columns,
        "rows": [[_cell(row.get(c)) for c in columns] for row in rows],
        "config": (manifest.get("spec") or {}).get("config", {}),
        "files": manifest.get("files", []),
    }
    html = template.render(context)
    report_path = Path(run_dir) / REPORT_NAME
    report_path.write_text(html, encoding="utf-8")
    return report_path
