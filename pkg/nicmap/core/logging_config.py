import logging
import logging.config
import os
import sys
from typing import Any, Dict, Optional

from nicmap.core.config import settings

TIME_FORMAT = "%Y-%m-%d %H:%M:%S"
LINE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"
ROTATE_BYTES = 10 * 1024 * 1024


class ColoredFormatter(logging.Formatter):
    """Console formatter that tints the level name"""

    PALETTE = {
        logging.DEBUG: "\033[2;36m",
        logging.INFO: "\033[32m",
        logging.WARNING: "\033[1;33m",
        logging.ERROR: "\033[1;31m",
        logging.CRITICAL: "\033[1;35m",
    }
    RESET = "\033[0m"

    def format(self, record):
        tint = self.PALETTE.get(record.levelno)
        if tint is None:
            return super().format(record)
        # file handlers share the record: tint a copy
        tinted = logging.makeLogRecord(record.__dict__)
        tinted.levelname = f"{tint}{record.levelname}{self.RESET}"
        return super().format(tinted)


def _rotating(filename: str, level: str, formatter: str) -> Dict[str, Any]:
    return {
        "class": "logging.handlers.RotatingFileHandler",
        "level": level,
        "formatter": formatter,
        "filename": os.path.join(settings.LOG_DIR, filename),
        "maxBytes": ROTATE_BYTES,
        "backupCount": 5,
        "encoding": "utf-8",
    }


def setup_logging(level: Optional[str] = None) -> None:
    """Configure the `nicmap` logger tree; `level` overrides LOG_LEVEL."""
    log_level = (level or settings.LOG_LEVEL).upper()
    colored = settings.DEBUG and sys.stderr.isatty()

    formatters: Dict[str, Any] = {
        "default": {"format": LINE_FORMAT, "datefmt": TIME_FORMAT},
        "detailed": {
            "format": "%(asctime)s %(levelname)s %(name)s [%(module)s.%(funcName)s:%(lineno)d] %(message)s",
            "datefmt": TIME_FORMAT,
        },
        "colored": {"()": ColoredFormatter, "format": LINE_FORMAT, "datefmt": TIME_FORMAT},
        "json": {
            "format": '{"ts": "%(asctime)s", "level": "%(levelname)s", "logger": "%(name)s", '
                      '"where": "%(module)s.%(funcName)s:%(lineno)d", "event": "%(message)s"}',
            "datefmt": TIME_FORMAT,
        },
    }
    # stdout belongs to reports and placement tables
    handlers: Dict[str, Any] = {
        "console": {
            "class": "logging.StreamHandler",
            "level": log_level,
            "formatter": "colored" if colored else "default",
            "stream": sys.stderr,
        },
    }
    package_handlers = ["console"]
    root_handlers = ["console"]

    if settings.ENABLE_FILE_LOGGING:
        os.makedirs(settings.LOG_DIR, exist_ok=True)
        handlers["file"] = _rotating("nicmap.log", "INFO", "json")
        handlers["error_file"] = _rotating("error.log", "ERROR", "detailed")
        package_handlers += ["file", "error_file"]
        root_handlers.append("error_file")

    logging.config.dictConfig({
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": formatters,
        "handlers": handlers,
        "loggers": {
            "nicmap": {"level": log_level, "handlers": package_handlers, "propagate": False},
            "tests": {"level": log_level, "propagate": True},
        },
        # third-party libraries only surface warnings
        "root": {"level": "WARNING", "handlers": root_handlers},
    })


logger = logging.getLogger("nicmap")


def log_mapping(strategy: str, jobs: int, processes: int, duration: float):
    logger.info(f"MAP {strategy} - {jobs} job(s), {processes} process(es) - {duration:.3f}s")


def log_simulation(label: str, messages: int, horizon_ns: int, duration: float):
    """One finished run: delivered messages, simulated horizon, wall time."""
    logger.info(
        f"SIM {label} - {messages} message(s), {horizon_ns / 1e9:.3f}s simulated - {duration:.3f}s wall"
    )


def log_report(target: str, rows: int, fmt: str):
    logger.debug(f"REPORT {fmt} - {rows} row(s) -> {target}")


def log_error(error: Exception, context: Optional[str] = None):
    """Log a domain error; tracebacks only in DEBUG."""
    where = f" in {context}" if context else ""
    logger.error(f"{type(error).__name__}{where}: {error}", exc_info=settings.DEBUG)
