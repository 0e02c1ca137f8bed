"""Logging setup shared by the CLI and library callers.

Records carry numerical context through `extra=` (n_qubits, layer, fidelity, ...).
The console shows plain text; the rotating file under `log_dir` gets one JSON
object per record with those fields, and Application Insights receives them as
custom dimensions when a connection string is configured.
"""

import json
import logging
import threading
from datetime import datetime, timezone
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

try:
    from opencensus.ext.azure.log_exporter import AzureLogHandler
except ImportError:  # pragma: no cover - optional dependency at runtime
    AzureLogHandler = None

LOG_FILE = "mpsencode.log"
HANDLER_PREFIX = "mpsencode_"
CONSOLE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

STRUCTURED_EXTRA_FIELDS = (
    # encoding
    "distribution",
    "n_qubits",
    "bond",
    "chi",
    "chi_max",
    "rank",
    "sweep",
    "oracle_calls",
    "mean_rel",
    "max_rel",
    # circuit
    "layer",
    "origin",
    "fidelity",
    "infidelity",
    "discarded_weight",
    "cnot_count",
    "depth",
    # validation and runs
    "kl",
    "ks_pvalue",
    "target",
    "command",
    "error",
)


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def record_extras(record: logging.LogRecord) -> Dict[str, Any]:
    """Known `extra=` fields present on the record, as JSON-friendly values."""
    return {
        name: _to_builtin(getattr(record, name))
        for name in STRUCTURED_EXTRA_FIELDS
        if hasattr(record, name)
    }


class StructuredFormatter(logging.Formatter):
    """One JSON object per record: location, message and the known extras."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        # sweep points log from pool threads
        if record.threadName != "MainThread":
            entry["thread"] = record.threadName
        entry.update(record_extras(record))
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


class AppInsightsDimensionsFilter(logging.Filter):
    """Copy the known extras into `custom_dimensions`, merging with any already set."""

    def filter(self, record: logging.LogRecord) -> bool:
        dimensions = record_extras(record)
        if dimensions:
            existing = getattr(record, "custom_dimensions", None)
            record.custom_dimensions = {**existing, **dimensions} if isinstance(existing, dict) else dimensions
        return True


def _install(root: logging.Logger, handler: logging.Handler, name: str, level: int) -> None:
    handler.set_name(HANDLER_PREFIX + name)
    handler.setLevel(level)
    # opencensus AzureLogHandler leaves lock=None after createLock(); Handler.handle needs a real one.
    if getattr(handler, "lock", None) is None:
        handler.createLock()
    if getattr(handler, "lock", None) is None:
        handler.lock = threading.RLock()
    root.addHandler(handler)


def _app_insights_handler(connection_string: str) -> Optional[logging.Handler]:
    if AzureLogHandler is None:
        logging.getLogger(__name__).warning(
            "Application Insights connection string is set but 'opencensus-ext-azure' is not installed; "
            "Azure log export is disabled"
        )
        return None
    try:
        handler = AzureLogHandler(connection_string=connection_string)
    except Exception as exc:
        logging.getLogger(__name__).warning("Could not create Application Insights handler: %s", exc)
        return None
    handler.addFilter(AppInsightsDimensionsFilter())
    return handler


def configure_logging(
    log_level: str = "INFO",
    log_dir: str = "logs",
    app_insights_connection_string: Optional[str] = None,
) -> None:
    """Attach console, daily-rotating JSON file and optional Azure handlers to the root logger.

    Safe to call repeatedly: handlers are recognised by name and added once.
    """
    level = getattr(logging, log_level.upper())
    root = logging.getLogger()
    root.setLevel(level)
    present = {h.get_name() for h in root.handlers}

    if HANDLER_PREFIX + "console_handler" not in present:
        console = logging.StreamHandler()
        console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        _install(root, console, "console_handler", level)

    if HANDLER_PREFIX + "file_handler" not in present:
        path = Path(log_dir)
        path.mkdir(parents=True, exist_ok=True)
        file_handler = TimedRotatingFileHandler(path / LOG_FILE, when="midnight", backupCount=30, utc=True)
        file_handler.suffix = "%Y-%m-%d"
        file_handler.setFormatter(StructuredFormatter())
        _install(root, file_handler, "file_handler", logging.DEBUG)

    if app_insights_connection_string and HANDLER_PREFIX + "app_insights_handler" not in present:
        handler = _app_insights_handler(app_insights_connection_string)
        if handler is not None:
            _install(root, handler, "app_insights_handler", level)

    logging.getLogger("azure").setLevel(logging.WARNING)
