"""
Base class for the command-line services (detect, synth, bench, evaluate).

Services run synchronously: frames are consumed strictly in order and the
only parallelism is the zone fan-out inside DetectorPipeline. A failure is
logged with its traceback and re-raised; the launcher maps the exception type
onto an exit status.
"""

import time
import traceback
from abc import ABC, abstractmethod
from typing import Any, Optional

from utils.log_utils import LogUtils, get_log_utils


class AbstractService(ABC):
    """
    run() drives initialize() -> execute() -> cleanup(); cleanup always runs.

    ``config`` is a RunConfig or Config; its ``settings.log_service`` section
    configures the log sink if this is the first user in the process.
    """

    def __init__(self, name: str, config: Any):
        self.name = name
        self.config = config
        self.elapsed_s: Optional[float] = None
        self._log_service: Optional[LogUtils] = None

    def run(self) -> Any:
        started = time.perf_counter()
        try:
            self.initialize()
            return self.execute()
        except Exception as e:
            self._handle_exception(e)
            raise
        finally:
            self.cleanup()
            self.elapsed_s = time.perf_counter() - started
            self.log("DEBUG", "finished", elapsed_s=self.elapsed_s)

    @abstractmethod
    def execute(self) -> Any:
        """Service body; its return value is the result of run()."""

    def initialize(self):
        settings = getattr(self.config, "settings", None)
        self._log_service = get_log_utils(settings.log_service if settings is not None else None)
        self._log_service.initialize()
        self.log("INFO", f"starting {self.name}")

    def cleanup(self):
        """Release service resources. Called after execute(), also on failure."""

    def _handle_exception(self, exception: Exception):
        self.log("ERROR", f"{type(exception).__name__}: {exception}")
        self.log("DEBUG", f"traceback:\n{traceback.format_exc()}")

    def log(self, level: str, message: str = "", frame: Optional[int] = None, **fields: Any):
        """Log through the shared sink, tagged with this service's name."""
        sink = self._log_service or get_log_utils()
        sink.log_message(self.name, level, message, frame=frame, **fields)
