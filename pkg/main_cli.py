import functools
import json
import logging
import pathlib
import sys
from typing import Optional

import click
import numpy as np
import typer

from benchmark.sensitivity import rebuild_statistics, run_benchmark
from config.settings import RunConfig, build_run_config, resolve_threads
from feature_selection.selector import select
from ingest.loader import write_ticker_csvs
from ingest.pipeline import prepare_dataset
from ingest.synthetic import generate_synthetic, synthetic_manifest
from report.writer import emit_report, load_report
from utils.errors import ConfigError, DataError, ShrinkBenchError
from utils.file_ops import ensure_output_dir, write_text

# Initialize Typer app
app = typer.Typer(help="Feature-selection sample-size sensitivity benchmark.", add_completion=False)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[logging.StreamHandler()],
)
logger = logging.getLogger(__name__)

CONFIG_OPTION = typer.Option(None, "--config", help="key=value or .json config file; flags override it.")
DATA_DIR_OPTION = typer.Option(None, "--data-dir", help="Directory of per-ticker OHLCV CSV files.")
SYNTHETIC_OPTION = typer.Option(None, "--synthetic", help="Synthetic data spec, e.g. n_rows=600,n_tickers=24,planted_count=3,noise_sigma=0.05,seed=7")
TARGET_OPTION = typer.Option(None, "--target", help="Target column id (default AAPL.Close).")
HORIZON_OPTION = typer.Option(None, "--horizon", help="Forecast horizon in rows (default 10).")


def guarded(func):
    """Maps configuration problems to exit code 1 and data problems to exit code 2."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as e:
            logger.error(f"Configuration error: {e}")
            typer.secho(f"Configuration error: {e}", fg=typer.colors.RED, err=True)
            raise typer.Exit(code=1)
        except (ShrinkBenchError, ValueError) as e:
            logger.error(f"Data error: {e}", exc_info=logger.isEnabledFor(logging.DEBUG))
            typer.secho(f"Data error: {e}", fg=typer.colors.RED, err=True)
            raise typer.Exit(code=2)
    return wrapper


def _config(config_path: Optional[pathlib.Path], **overrides) -> RunConfig:
    return build_run_config(config_path, **overrides)


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging.")):
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


@app.command()
@guarded
def ingest(
    config_path: Optional[pathlib.Path] = CONFIG_OPTION,
    data_dir: Optional[str] = DATA_DIR_OPTION,
    synthetic: Optional[str] = SYNTHETIC_OPTION,
    target: Optional[str] = TARGET_OPTION,
    horizon: Optional[int] = HORIZON_OPTION,
    start_date: Optional[str] = typer.Option(None, "--start-date", help="YYYY-MM-DD, default 2016-01-01."),
    end_date: Optional[str] = typer.Option(None, "--end-date", help="YYYY-MM-DD, default 2024-01-28."),
):
    """
    Loads and aligns a data source and prints dataset statistics.
    """
    cfg = _config(config_path, data_dir=data_dir, synthetic=synthetic, target_id=target,
                  horizon=horizon, start_date=start_date, end_date=end_date)
    ds, loaded = prepare_dataset(cfg)
    m = loaded.matrix

    typer.echo(f"Source: {loaded.source}")
    typer.echo(f"Aligned rows: {m.n_rows}  columns: {m.n_cols}")
    typer.echo(f"Dates: {m.dates[0].isoformat()} .. {m.dates[-1].isoformat()}")
    typer.echo(f"Target: {ds.target_id} +{ds.horizon} rows -> {ds.n_rows} usable rows")
    for f in loaded.files:
        typer.echo(f"  {f.path}  sha256={f.sha256}  rows={f.total_rows}  dropped={f.dropped_rows}")
    typer.echo("Series statistics:")
    for i, column_id in enumerate(m.column_ids):
        col = m.values[:, i]
        typer.echo(f"  {column_id:<24} mean={col.mean():.6g} std={np.std(col, ddof=1):.6g} min={col.min():.6g} max={col.max():.6g}")


@app.command()
@guarded
def synth(
    config_path: Optional[pathlib.Path] = CONFIG_OPTION,
    synthetic: Optional[str] = SYNTHETIC_OPTION,
    out: Optional[str] = typer.Option(None, "--out", help="Directory for the CSV files and manifest.json."),
):
    """
    Writes a synthetic per-ticker CSV dataset plus a manifest of planted features.
    """
    cfg = _config(config_path, synthetic=synthetic, out_dir=out)
    if cfg.synthetic is None:
        raise ConfigError("synth needs --synthetic (or synthetic= in the config file)")
    out_dir = ensure_output_dir(cfg.out_dir)
    written = write_ticker_csvs(generate_synthetic(cfg.synthetic), out_dir)
    manifest = out_dir / "manifest.json"
    write_text(manifest, json.dumps(synthetic_manifest(cfg.synthetic), indent=2, sort_keys=True) + "\n")
    typer.secho(f"Wrote {len(written)} ticker files and {manifest}", fg=typer.colors.GREEN)


@app.command(name="select")
@guarded
def select_command(
    config_path: Optional[pathlib.Path] = CONFIG_OPTION,
    data_dir: Optional[str] = DATA_DIR_OPTION,
    synthetic: Optional[str] = SYNTHETIC_OPTION,
    target: Optional[str] = TARGET_OPTION,
    horizon: Optional[int] = HORIZON_OPTION,
    method: str = typer.Option("var", "--method", help="Selector id, e.g. var, lasso, dtw."),
    k: Optional[int] = typer.Option(None, "--k", help="Number of features to select (default 10)."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    as_json: bool = typer.Option(False, "--json", help="Print the full SelectionResult as JSON."),
):
    """
    Runs one selector on the full dataset and prints the selected feature ids, best first.
    """
    cfg = _config(config_path, data_dir=data_dir, synthetic=synthetic, target_id=target,
                  horizon=horizon, k=k, seed=seed, methods=method)
    ds, _ = prepare_dataset(cfg)
    result = select(ds, cfg.selector_spec(method))
    if as_json:
        typer.echo(result.model_dump_json(indent=2))
        return
    for feature_id in result.selected:
        typer.echo(feature_id)


@app.command()
@guarded
def bench(
    config_path: Optional[pathlib.Path] = CONFIG_OPTION,
    data_dir: Optional[str] = DATA_DIR_OPTION,
    synthetic: Optional[str] = SYNTHETIC_OPTION,
    target: Optional[str] = TARGET_OPTION,
    horizon: Optional[int] = HORIZON_OPTION,
    methods: Optional[str] = typer.Option(None, "--methods", help="Comma-separated method ids (default: the 15 standard methods)."),
    k: Optional[int] = typer.Option(None, "--k"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", help="Parallel workers (default SHRINKBENCH_THREADS, else all CPUs)."),
    full_schedule: bool = typer.Option(False, "--full-schedule", help="81 fractions in 1-point steps instead of 17 in 5-point steps."),
    shrink_policy: Optional[str] = typer.Option(None, "--shrink-policy", help="suffix (most recent rows), prefix or random."),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory (default ./out)."),
    no_timestamp: bool = typer.Option(False, "--no-timestamp", help="Leave the generation time out of report.md."),
):
    """
    Runs the full shrink benchmark and writes tables, charts and report.json.
    """
    cfg = _config(
        config_path, data_dir=data_dir, synthetic=synthetic, target_id=target, horizon=horizon,
        methods=methods, k=k, seed=seed, threads=jobs, shrink_policy=shrink_policy, out_dir=out,
        full_schedule=True if full_schedule else None, no_timestamp=True if no_timestamp else None,
    )
    ensure_output_dir(cfg.out_dir)
    ds, loaded = prepare_dataset(cfg)

    extra = {"data_files": loaded.provenance, "n_rows": ds.n_rows, "n_features": len(ds.column_ids)}
    if cfg.synthetic is not None:
        extra["planted_ids"] = synthetic_manifest(cfg.synthetic)["planted_ids"]
    report = run_benchmark(
        ds, cfg.selector_specs(), cfg.schedule(), cfg.seed,
        n_jobs=resolve_threads(cfg), config=cfg.snapshot(**extra),
    )
    paths = emit_report(report, cfg.out_dir, timestamp=not cfg.no_timestamp)
    typer.secho(f"Benchmark complete: {len(paths)} files in {cfg.out_dir}", fg=typer.colors.GREEN)
    typer.echo(f"Best by mean R-squared: {', '.join(report.rank_by_mean_r2[:5])}")


@app.command(name="report")
@guarded
def report_command(
    report_json: pathlib.Path = typer.Argument(..., help="An existing report.json."),
    out: Optional[str] = typer.Option(None, "--out", help="Output directory (default: the report's directory)."),
    no_timestamp: bool = typer.Option(False, "--no-timestamp"),
):
    """
    Re-renders every output from report.json, recomputing statistics from the raw points.
    """
    report = rebuild_statistics(load_report(report_json))
    out_dir = out or str(report_json.parent)
    paths = emit_report(report, out_dir, timestamp=not no_timestamp)
    typer.secho(f"Re-rendered {len(paths)} files in {out_dir}", fg=typer.colors.GREEN)


def cli_main(argv: list[str] | None = None) -> int:
    """Runs the CLI and returns 0 on success, 1 on usage or config errors, 2 on data errors."""
    command = typer.main.get_command(app)
    try:
        result = command.main(args=argv, prog_name="shrinkbench", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(cli_main(sys.argv[1:]))
