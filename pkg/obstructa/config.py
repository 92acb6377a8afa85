"""Environment configuration for the obstructa CLI and MCP server."""

import os
import logging
from pathlib import Path
from typing import Optional

CONFIG_DIR = Path.home() / ".config" / "obstructa"
DEFAULT_HISTORY_DB = Path.home() / ".cache" / "obstructa" / "runs.db"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def load_config() -> Optional[Path]:
    """Load configuration from ~/.config/obstructa/.env or current directory.

    Values already present in the environment win over the file.

    Returns:
        Path of the file that was read, or None when neither exists
    """
    config_file = CONFIG_DIR / ".env"

    if config_file.exists():
        env_path = config_file
    else:
        env_path = Path.cwd() / ".env"

    if env_path.exists():
        with open(env_path) as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith('#'):
                    key, _, value = line.partition('=')
                    if key and value:
                        os.environ.setdefault(key.strip(), value.strip())
        return env_path
    return None


def get_env(key: str, default: Optional[str] = None, required: bool = False) -> Optional[str]:
    """Read an environment variable.

    Raises:
        ValueError: If required and unset
    """
    value = os.getenv(key)
    if value:
        return value
    if required:
        raise ValueError(f"Missing required environment variable: {key}")
    return default


def get_threads(override: Optional[int] = None) -> int:
    """Solver thread count: explicit override, then OBSTRUCTA_THREADS, then CPU count.

    Raises:
        ValueError: If the resolved value is not a positive integer
    """
    if override is not None:
        threads = override
    else:
        raw = get_env("OBSTRUCTA_THREADS")
        if raw is None:
            return os.cpu_count() or 1
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"OBSTRUCTA_THREADS must be an integer, got {raw!r}") from None
    if threads < 1:
        raise ValueError(f"Thread count must be at least 1, got {threads}")
    return threads


def get_log_level(default: str = "WARNING") -> int:
    name = (get_env("OBSTRUCTA_LOG_LEVEL") or default).upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING


def get_history_db_path() -> Path:
    """Path of the run-history database, creating its parent directory."""
    path = Path(get_env("OBSTRUCTA_HISTORY_DB") or DEFAULT_HISTORY_DB).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def configure_logging(default_level: str = "WARNING") -> None:
    """Send log records to stderr in the project format."""
    logging.basicConfig(level=get_log_level(default_level), format=LOG_FORMAT)
