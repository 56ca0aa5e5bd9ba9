import hashlib
import logging
import os
import pathlib

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

TICKER_CSV_SUFFIXES = {'.csv'}


def get_file_hash(file_path: str | os.PathLike) -> str | None:
    """Calculate SHA256 hash of file content"""
    try:
        hash_sha256 = hashlib.sha256()
        with open(file_path, "rb") as f:
            for chunk in iter(lambda: f.read(4096), b""):
                hash_sha256.update(chunk)
        return hash_sha256.hexdigest()
    except OSError as e:
        logger.error(f"Error calculating SHA256 hash for {file_path}: {e}")
        return None


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from arbitrary parts, independent of PYTHONHASHSEED."""
    key = ":".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def is_ticker_csv(file_path: str | os.PathLike) -> bool:
    """A per-ticker export: a regular, non-hidden .csv file."""
    path = pathlib.Path(file_path)
    return (
        path.is_file()
        and path.suffix.lower() in TICKER_CSV_SUFFIXES
        and not path.name.startswith('.')
    )


def should_skip_directory(dir_path: str) -> bool:
    """Check if directory should be skipped while scanning a data dir"""
    skip_dirs = {
        '__pycache__', '.git', 'venv', '.venv', 'charts', 'out', 'output',
        '.cache', 'tmp', '.tmp',
    }
    dir_name = os.path.basename(dir_path).lower()
    return dir_name in skip_dirs or dir_name.startswith('.')


def ensure_output_dir(out_dir: str | os.PathLike) -> pathlib.Path:
    """Create out_dir (and parents) and verify it is writable."""
    path = pathlib.Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create output directory {path}: {e}") from e
    if not os.access(path, os.W_OK):
        raise ConfigError(f"Output directory {path} is not writable")
    return path


def write_text(path: pathlib.Path, content: str) -> None:
    # newline='\n' keeps outputs byte-identical across platforms
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(content)
