from typing import Optional

from pydantic import ValidationError

from core.constants import ExitCodes
from core.errors import (
    FrameDecodeError,
    FrameDimensionError,
    ScenarioError,
    StructuralError,
    ZoneConfigError,
)
from utils.config_utils import Config, RunConfig
from utils.log_utils import get_log_utils
from utils.report import print_benchmark, print_detection, print_error, print_evaluation


def exit_code_for(exc: BaseException) -> Optional[int]:
    """Exit status of a failed run; None for errors that are not expected."""
    if isinstance(exc, (FrameDecodeError, FrameDimensionError)):
        return ExitCodes.DECODE_ERROR
    if isinstance(exc, (ZoneConfigError, ScenarioError, StructuralError, ValidationError, ValueError)):
        return ExitCodes.CONFIG_ERROR
    if isinstance(exc, OSError):
        return ExitCodes.IO_ERROR
    return None


class VloopLauncher:
    """Builds run configurations from the command line and maps failures onto exit statuses."""

    def __init__(self, config_name=None):
        self.config_name = config_name
        self._settings = None

    @property
    def settings(self):
        if self._settings is None:
            try:
                self._settings = Config(self.config_name).settings
            except FileNotFoundError as e:
                raise ValueError(f"configuration: {e}") from e
        return self._settings

    def _guarded(self, action) -> int:
        try:
            action()
            return ExitCodes.OK
        except Exception as e:
            code = exit_code_for(e)
            if code is None:
                raise
            print_error(str(e))
            return code
        finally:
            get_log_utils().cleanup()

    def detect(self, input=None, zones=None, out=None, calib_interval=None, overlay_dir=None, snapshot_dir=None) -> int:
        from services.detection_service import DetectionService

        def action():
            cfg = RunConfig(
                input=input,
                zones=zones,
                out=out,
                calib_interval=calib_interval,
                overlay_dir=overlay_dir,
                snapshot_dir=snapshot_dir,
                settings=self.settings,
            )
            print_detection(DetectionService(cfg).run())

        return self._guarded(action)

    def synth(self, spec, out_dir) -> int:
        from services.synth_service import SynthService

        def action():
            written = SynthService(RunConfig(settings=self.settings), spec, out_dir).run()
            print(f"{len(written['frames'])} frames -> {out_dir}")

        return self._guarded(action)

    def bench(self, frames=None, size=None, zones=None, input=None) -> int:
        from services.benchmark_service import BenchmarkService

        def action():
            cfg = RunConfig(input=input, zones=zones, benchmark=True, settings=self.settings)
            report = BenchmarkService(cfg, frames=frames, size=size).run()
            print_benchmark(report, self.settings.benchmark.target_fps)

        return self._guarded(action)

    def evaluate(self, records, truth, fps=25.0, interval_s=2.0) -> int:
        from services.evaluation_service import EvaluationService

        def action():
            report = EvaluationService(RunConfig(settings=self.settings), records, truth, fps, interval_s).run()
            print_evaluation(report)

        return self._guarded(action)
