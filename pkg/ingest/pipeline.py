"""Turns a RunConfig's data source into an AlignedDataset."""
import logging

from pydantic import BaseModel, ConfigDict, Field

from config.settings import RunConfig
from dataset.alignment import align, build_horizon_target
from dataset.schemas import AlignedDataset, FeatureMatrix, TimeSeries
from ingest.loader import TickerFile, filter_dates, load_ticker_file
from ingest.synthetic import generate_synthetic
from scanner.scanner import scan_data_dir
from utils.errors import ConfigError, DataError

logger = logging.getLogger(__name__)


class LoadedData(BaseModel):
    """Aligned matrix plus where it came from."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: FeatureMatrix
    files: tuple[TickerFile, ...] = ()
    source: str
    provenance: dict[str, str | None] = Field(default_factory=dict)


def load_series(config: RunConfig) -> tuple[list[TimeSeries], tuple[TickerFile, ...], str]:
    if config.synthetic is not None:
        return generate_synthetic(config.synthetic), (), "synthetic"
    if not config.data_dir:
        raise ConfigError("No data source: pass --data-dir or --synthetic")

    files = tuple(load_ticker_file(p) for p in scan_data_dir(config.data_dir))
    tickers = [f.ticker for f in files]
    dupes = sorted({t for t in tickers if tickers.count(t) > 1})
    if dupes:
        raise DataError(f"Ticker(s) {dupes} appear in more than one file under {config.data_dir}")
    series = [s for f in files for s in f.series]
    return series, files, config.data_dir


def load_data(config: RunConfig) -> LoadedData:
    series, files, source = load_series(config)
    # generated calendars ignore the date window
    if config.synthetic is None:
        series = filter_dates(series, config.start_date, config.end_date)
    if not series:
        raise DataError(f"No series has data between {config.start_date} and {config.end_date}")
    matrix = align(series)
    return LoadedData(
        matrix=matrix,
        files=files,
        source=source,
        provenance={f.path: f.sha256 for f in files},
    )


def prepare_dataset(config: RunConfig) -> tuple[AlignedDataset, LoadedData]:
    loaded = load_data(config)
    ds = build_horizon_target(loaded.matrix, config.target_id, config.horizon)
    logger.info(f"Dataset ready: {ds.n_rows} rows x {len(ds.column_ids)} features, target {ds.target_id} +{ds.horizon}")
    return ds, loaded
