import json
import logging
import pathlib
from datetime import datetime, timezone

import pandas as pd
from pydantic import ValidationError

from benchmark.schemas import SensitivityReport
from report.charts import render_charts
from utils.errors import DataError
from utils.file_ops import ensure_output_dir, write_text

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = (
    "method_id", "mean_r2", "slope", "fluctuation", "rank_mean_r2", "rank_abs_slope",
    "rank_fluctuation", "composite_score", "composite_rank", "family", "mean_fold_std", "error_cells",
)
TRAJECTORY_COLUMNS = ("method_id", "family", "fraction", "n_rows", "mean_r2", "fold_std", "selected", "error")


def _fmt(value: float | None, digits: int = 6) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def _config_line(report: SensitivityReport) -> str:
    return "# config=" + json.dumps(report.config, sort_keys=True, separators=(",", ":")) + "\n"


def render_trajectories_csv(report: SensitivityReport) -> str:
    rows = [
        {
            "method_id": t.method_id,
            "family": t.family,
            "fraction": _fmt(p.fraction, 2),
            "n_rows": str(p.n_rows),
            "mean_r2": _fmt(p.mean_r2),
            "fold_std": _fmt(p.fold_std),
            "selected": ";".join(p.selected),
            "error": p.error or "",
        }
        for t in report.trajectories
        for p in t.points
    ]
    frame = pd.DataFrame(rows, columns=list(TRAJECTORY_COLUMNS))
    return _config_line(report) + frame.to_csv(index=False, lineterminator="\n")


def render_summary_csv(report: SensitivityReport) -> str:
    """Table of per-method statistics in rank_by_mean_r2 order."""
    rows = []
    for method_id in report.rank_by_mean_r2:
        t = report.trajectory(method_id)
        rows.append({
            "method_id": method_id,
            "mean_r2": _fmt(t.mean_r2_overall),
            "slope": _fmt(t.slope),
            "fluctuation": _fmt(t.fluctuation),
            "rank_mean_r2": str(report.rank_of(method_id, "rank_by_mean_r2")),
            "rank_abs_slope": str(report.rank_of(method_id, "rank_by_abs_slope")),
            "rank_fluctuation": str(report.rank_of(method_id, "rank_by_fluctuation")),
            "composite_score": str(report.composite_scores.get(method_id, "")),
            "composite_rank": str(report.rank_of(method_id, "composite_rank")),
            "family": t.family,
            "mean_fold_std": _fmt(t.mean_fold_std),
            "error_cells": str(t.error_cells),
        })
    frame = pd.DataFrame(rows, columns=list(SUMMARY_COLUMNS))
    return _config_line(report) + frame.to_csv(index=False, lineterminator="\n")


def render_markdown(report: SensitivityReport, timestamp: bool = True) -> str:
    lines = ["# Feature-selection sample-size sensitivity report", ""]
    if timestamp:
        lines += [f"Generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}", ""]

    lines += ["## Average R-squared by method", "",
              "| rank | method | family | mean R² | slope | fluctuation | composite |",
              "|---:|---|---|---:|---:|---:|---:|"]
    for i, method_id in enumerate(report.rank_by_mean_r2, start=1):
        t = report.trajectory(method_id)
        lines.append(
            f"| {i} | {method_id} | {t.family} | {_fmt(t.mean_r2_overall) or 'n/a'} | "
            f"{_fmt(t.slope) or 'n/a'} | {_fmt(t.fluctuation) or 'n/a'} | {report.rank_of(method_id, 'composite_rank')} |"
        )

    lines += ["", "## Rankings", ""]
    for label, name in (("Mean R² (higher is better)", "rank_by_mean_r2"),
                        ("|Slope| (lower is less sensitive to sample size)", "rank_by_abs_slope"),
                        ("Fluctuation (lower is steadier)", "rank_by_fluctuation"),
                        ("Composite (sum of the three ranks)", "composite_rank")):
        lines.append(f"- **{label}:** {', '.join(getattr(report, name))}")

    if report.families:
        lines += ["", "## Method families", "",
                  "| family | methods | mean R² | mean |slope| | mean fluctuation |",
                  "|---|---|---:|---:|---:|"]
        for fam in report.families:
            lines.append(
                f"| {fam.family} | {', '.join(fam.methods)} | {_fmt(fam.mean_r2) or 'n/a'} | "
                f"{_fmt(fam.mean_abs_slope) or 'n/a'} | {_fmt(fam.mean_fluctuation) or 'n/a'} |"
            )

    failed = [(t.method_id, p) for t in report.trajectories for p in t.points if p.error]
    if failed:
        lines += ["", "## Failed cells", ""]
        lines += [f"- {m} at {p.fraction:.2f}: {p.error}" for m, p in failed]

    lines += [
        "", "## Notes", "",
        "- `mean R²` averages the per-fraction 10-fold means over the schedule; "
        "`mean_fold_std` in summary.csv averages the per-fraction fold spread.",
        "- `edit_distance` is the EDR measure (edit distance on real sequences).",
        "- Folds are random row partitions, so neighbouring days can sit in train and test folds.",
        "", "## Configuration", "", "```json",
        json.dumps(report.config, indent=2, sort_keys=True),
        "```", "",
    ]
    return "\n".join(lines)


def emit_report(report: SensitivityReport, out_dir: str | pathlib.Path, timestamp: bool = True) -> list[pathlib.Path]:
    """Writes CSV tables, markdown, JSON and SVG charts; returns the written paths."""
    out = ensure_output_dir(out_dir)
    charts_dir = ensure_output_dir(out / "charts")

    outputs = {
        out / "trajectories.csv": render_trajectories_csv(report),
        out / "summary.csv": render_summary_csv(report),
        out / "report.md": render_markdown(report, timestamp),
        out / "report.json": report.model_dump_json(indent=2) + "\n",
    }
    for name, svg in render_charts(report).items():
        outputs[charts_dir / name] = svg

    for path, content in outputs.items():
        write_text(path, content)
    logger.info(f"Wrote {len(outputs)} report files to {out}")
    return list(outputs)


def load_report(path: str | pathlib.Path) -> SensitivityReport:
    path = pathlib.Path(path)
    try:
        return SensitivityReport.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DataError(f"Cannot read report {path}: {e}") from e
    except ValidationError as e:
        raise DataError(f"{path} is not a valid report: {e}") from e
