"""
Application Settings

Environment-driven configuration and logging setup.
"""

import logging
import os
from typing import Dict

from dotenv import load_dotenv
from rich.logging import RichHandler

# Load environment variables from .env file
load_dotenv()

APP_NAME = "lexspec"
ENV_PREFIX = "LEXSPEC_"
LOG_LEVEL = os.getenv(f"{ENV_PREFIX}LOG_LEVEL", "INFO").upper()

_VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def env_overrides() -> Dict[str, str]:
    """
    Collect run-config overrides from the environment.

    Every variable named LEXSPEC_<KEY> becomes an override for the lowercase
    run-config key <key>. LEXSPEC_LOG_LEVEL is reserved for logging.

    Returns:
        Dict mapping run-config key -> raw string value
    """
    overrides = {}
    for name, value in os.environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key == "log_level":
            continue
        overrides[key] = value
    return overrides


def validate_settings():
    """
    Validate environment-level settings.

    Raises:
        ValueError: If LEXSPEC_LOG_LEVEL names an unknown level
    """
    if LOG_LEVEL not in _VALID_LOG_LEVELS:
        raise ValueError(
            f"Invalid {ENV_PREFIX}LOG_LEVEL '{LOG_LEVEL}'. "
            f"Expected one of: {', '.join(_VALID_LOG_LEVELS)}"
        )


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Install a rich log handler on the root logger (idempotent)."""
    root = logging.getLogger()
    if any(isinstance(h, RichHandler) for h in root.handlers):
        root.setLevel(level)
        return
    handler = RichHandler(show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
