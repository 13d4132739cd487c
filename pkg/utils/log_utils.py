"""
Process-wide log sink for the detector.

Every message carries its source (service or pipeline name) and, for
pipeline events, the frame index and key=value fields:

    [12:00:01] INFO    pipeline: frame 141 zone=D1 state=occupied s=412.3 t_high=230.1

The rotating file always receives DEBUG and above. The console echo runs on a
background thread with its own threshold, so a slow terminal never stalls
frame processing.
"""

import logging
import os
import sys
import threading
from datetime import datetime
from logging.handlers import RotatingFileHandler
from queue import Empty, Queue
from typing import Any, Mapping, Optional

LEVELS = {"DEBUG": logging.DEBUG, "INFO": logging.INFO, "WARNING": logging.WARNING, "ERROR": logging.ERROR}

LOG_FILE = "vloop.log"


def _format_fields(fields: Mapping[str, Any]) -> str:
    parts = []
    for key, value in fields.items():
        if isinstance(value, float):
            value = f"{value:.1f}"
        parts.append(f"{key}={value}")
    return " ".join(parts)


def compose(message: str, frame: Optional[int] = None, fields: Optional[Mapping[str, Any]] = None) -> str:
    """Render a message with its optional frame prefix and trailing fields."""
    text = message
    if frame is not None:
        text = f"frame {frame}" + (f" {text}" if text else "")
    if fields:
        text = f"{text} {_format_fields(fields)}" if text else _format_fields(fields)
    return text


class LogUtils:
    """
    Singleton sink shared by the pipeline and all services.

    The first caller's settings win: either the ``log_service`` section as a
    mapping (or pydantic model), or a dict wrapping it under ``log_service``.
    """

    _instance = None
    _lock = threading.Lock()

    def __new__(cls, settings: Any = None):
        with cls._lock:
            if cls._instance is None:
                cls._instance = super().__new__(cls)
            return cls._instance

    def __init__(self, settings: Any = None):
        if hasattr(self, "_initialized"):
            return

        section = self._section(settings)
        self.directory = section.get("directory", "logs")
        self.console_output = bool(section.get("console_output", True))
        self.console_level = LEVELS.get(str(section.get("console_level", "INFO")).upper(), logging.INFO)
        self.file_output = bool(section.get("file_output", True))
        self.max_file_size = int(section.get("max_file_size_mb", 10)) * 1024 * 1024
        self.backup_count = int(section.get("backup_count", 5))

        self._queue: Queue = Queue()
        self._console_thread: Optional[threading.Thread] = None
        self._echoing = False
        self.file_logger: Optional[logging.Logger] = self._open_file() if self.file_output else None

        self._initialized = True

    @staticmethod
    def _section(settings: Any) -> Mapping[str, Any]:
        if settings is None:
            return {}
        if hasattr(settings, "model_dump"):
            settings = settings.model_dump()
        if "log_service" in settings:
            return settings["log_service"] or {}
        return settings

    def _open_file(self) -> logging.Logger:
        os.makedirs(self.directory, exist_ok=True)
        logger = logging.getLogger("vloop")
        logger.setLevel(logging.DEBUG)
        logger.propagate = False
        logger.handlers = []

        handler = RotatingFileHandler(
            os.path.join(self.directory, LOG_FILE),
            maxBytes=self.max_file_size,
            backupCount=self.backup_count,
        )
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
        logger.addHandler(handler)
        return logger

    def initialize(self):
        """Start the console echo thread; repeated calls are no-ops."""
        if self._echoing or not self.console_output:
            return
        self._echoing = True
        self._console_thread = threading.Thread(target=self._echo, name="vloop-log", daemon=True)
        self._console_thread.start()

    def _echo(self):
        while self._echoing:
            try:
                line = self._queue.get(timeout=0.1)
            except Empty:
                continue
            print(line, file=sys.stderr, flush=True)
            self._queue.task_done()

    def log_message(
        self,
        source: str,
        level: str,
        message: str = "",
        frame: Optional[int] = None,
        **fields: Any,
    ):
        """
        Log one message; thread-safe, callable from zone workers.

        Args:
            source: Name of the emitting service or pipeline
            level: DEBUG, INFO, WARNING or ERROR
            message: Free text
            frame: Frame index the event belongs to, if any
            **fields: Rendered as key=value after the text
        """
        level = level.upper()
        numeric = LEVELS.get(level, logging.INFO)
        text = f"{source}: {compose(message, frame, fields)}"

        if self.console_output and numeric >= self.console_level:
            line = f"[{datetime.now():%H:%M:%S}] {level:<7} {text}"
            if self._echoing:
                self._queue.put_nowait(line)
            else:
                print(line, file=sys.stderr, flush=True)

        if self.file_logger is not None:
            self.file_logger.log(numeric, text)

    def cleanup(self):
        """Stop the echo thread and flush whatever is still queued."""
        self._echoing = False
        if self._console_thread is not None and self._console_thread.is_alive():
            self._console_thread.join(timeout=2)
        self._console_thread = None

        while True:
            try:
                print(self._queue.get_nowait(), file=sys.stderr, flush=True)
            except Empty:
                break


_log_utils_instance: Optional[LogUtils] = None


def get_log_utils(settings: Any = None) -> LogUtils:
    """Get or create the singleton LogUtils instance."""
    global _log_utils_instance
    if _log_utils_instance is None:
        _log_utils_instance = LogUtils(settings)
    return _log_utils_instance
