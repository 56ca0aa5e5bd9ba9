import os
import pathlib
import logging

from utils.errors import DataError
from utils.file_ops import is_ticker_csv, should_skip_directory

logger = logging.getLogger(__name__)


def scan_data_dir(data_dir: str | os.PathLike) -> list[str]:
    """
    Walks data_dir recursively and returns every per-ticker CSV, sorted by path
    so column order does not depend on directory listing order.
    Skips directories rejected by utils.file_ops.should_skip_directory.
    """
    abs_base_path = str(pathlib.Path(data_dir).resolve())
    if not os.path.isdir(abs_base_path):
        raise DataError(f"Data directory {abs_base_path} does not exist or is not a directory")

    logger.info(f"Scanning data directory: {abs_base_path}")
    csv_paths: list[str] = []
    for root, dirs, files in os.walk(abs_base_path, topdown=True):
        # Modifying dirs[:] in place prunes the walk
        dirs[:] = [d for d in dirs if not should_skip_directory(os.path.join(root, d))]
        for file_name in files:
            file_path = os.path.join(root, file_name)
            if is_ticker_csv(file_path):
                csv_paths.append(file_path)

    csv_paths.sort()
    logger.info(f"Found {len(csv_paths)} ticker files in {abs_base_path}")
    if not csv_paths:
        raise DataError(f"No .csv files found under {abs_base_path}")
    return csv_paths
