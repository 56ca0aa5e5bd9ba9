"""Yahoo-style per-ticker OHLCV CSV ingestion."""
import logging
import pathlib
from datetime import date

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from dataset.schemas import TimeSeries
from utils.errors import CsvFormatError
from utils.file_ops import get_file_hash

logger = logging.getLogger(__name__)

FIELDS = ("Open", "High", "Low", "Close", "Volume")
REQUIRED_COLUMNS = ("Date",) + FIELDS


class TickerFile(BaseModel):
    """A parsed ticker CSV with its provenance."""

    model_config = ConfigDict(frozen=True)

    path: str
    ticker: str
    sha256: str | None
    total_rows: int
    dropped_rows: int
    series: tuple[TimeSeries, ...]


def load_ticker_csv(path: str | pathlib.Path) -> list[TimeSeries]:
    return list(load_ticker_file(path).series)


def load_ticker_file(path: str | pathlib.Path) -> TickerFile:
    """
    One series per OHLCV field, named ``<TICKER>.<Field>`` with the ticker
    taken from the file stem. ``Adj Close`` and other extra columns are
    ignored; rows with any missing or unparseable field are dropped.
    """
    path = pathlib.Path(path)
    ticker = path.stem
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise CsvFormatError(f"{path}: file is empty") from e
    except (OSError, pd.errors.ParserError) as e:
        raise CsvFormatError(f"{path}: cannot read CSV: {e}") from e

    missing = [c for c in REQUIRED_COLUMNS if c not in raw.columns]
    if missing:
        raise CsvFormatError(f"{path}: missing required header(s) {missing}")

    dates = pd.to_datetime(raw["Date"].str.strip(), format="%Y-%m-%d", errors="coerce")
    values = {f: pd.to_numeric(raw[f].str.strip(), errors="coerce") for f in FIELDS}
    valid = dates.notna()
    for column in values.values():
        valid &= column.notna() & np.isfinite(column.astype(float))

    dropped = int((~valid).sum())
    if dropped:
        logger.info(f"{path.name}: dropped {dropped} of {len(raw)} rows with missing or unparseable fields")
    if not valid.any():
        raise CsvFormatError(f"{path}: no valid rows")

    kept_dates = dates[valid]
    if kept_dates.duplicated().any():
        dupes = sorted({d.date().isoformat() for d in kept_dates[kept_dates.duplicated()]})
        raise CsvFormatError(f"{path}: duplicate dates {dupes[:5]}")

    order = np.argsort(kept_dates.to_numpy(), kind="stable")
    date_tuple = tuple(d.date() for d in kept_dates.iloc[order])
    try:
        series = tuple(
            TimeSeries(
                id=f"{ticker}.{f}",
                dates=date_tuple,
                values=values[f][valid].to_numpy(dtype=np.float64)[order],
            )
            for f in FIELDS
        )
    except ValidationError as e:
        raise CsvFormatError(f"{path}: {e.errors()[0]['msg']}") from e
    return TickerFile(
        path=str(path),
        ticker=ticker,
        sha256=get_file_hash(path),
        total_rows=len(raw),
        dropped_rows=dropped,
        series=series,
    )


def filter_dates(series: list[TimeSeries], start: date | None, end: date | None) -> list[TimeSeries]:
    """Restricts every series to start <= date <= end; series left with < 2 rows are dropped."""
    kept = []
    removed = 0
    for s in series:
        mask = [(start is None or d >= start) and (end is None or d <= end) for d in s.dates]
        if all(mask):
            kept.append(s)
            continue
        idx = np.flatnonzero(mask)
        removed += len(s.dates) - len(idx)
        if len(idx) < 2:
            logger.warning(f"{s.id}: fewer than 2 observations between {start} and {end}; series skipped")
            continue
        kept.append(TimeSeries(id=s.id, dates=tuple(s.dates[i] for i in idx), values=s.values[idx]))
    if removed:
        logger.info(f"Date window {start}..{end} removed {removed} observations across {len(series)} series")
    return kept


def write_ticker_csvs(series: list[TimeSeries], out_dir: pathlib.Path) -> list[pathlib.Path]:
    """Writes series back out as one Yahoo-schema CSV per ticker."""
    by_ticker: dict[str, dict[str, TimeSeries]] = {}
    for s in series:
        ticker, _, field = s.id.rpartition(".")
        by_ticker.setdefault(ticker, {})[field] = s

    written = []
    for ticker, fields in by_ticker.items():
        missing = [f for f in FIELDS if f not in fields]
        if missing:
            raise CsvFormatError(f"{ticker}: cannot write a CSV without fields {missing}")
        frame = pd.DataFrame(
            {f: fields[f].values for f in FIELDS},
            index=pd.Index([d.isoformat() for d in fields["Close"].dates], name="Date"),
        )
        path = out_dir / f"{ticker}.csv"
        frame.to_csv(path, lineterminator="\n", float_format="%.17g")
        written.append(path)
    return written
