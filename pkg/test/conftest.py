import os

import hypothesis
import pytest

from utils.log_utils import get_log_utils

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

# first caller configures the singleton: keep test runs quiet and off disk
get_log_utils({"log_service": {"console_output": False, "file_output": False}})


@pytest.fixture
def settings():
    from utils.config_utils import DetectorSettings

    return DetectorSettings()


@pytest.fixture
def small_settings():
    """Short evidence window, so 50-frame scenes get past warm-up."""
    from utils.config_utils import DetectorSettings

    return DetectorSettings(count_classifier={"n_full": 20.0, "n_zero": 5.0})


@pytest.fixture
def run_detector():
    """Run the optimized pipeline over frames, returning all records."""
    from core.pipeline import DetectorPipeline

    def _run(frames, zones, settings):
        records = []
        first = frames[0]
        with DetectorPipeline(zones, settings, first.width, first.height) as pipeline:
            for frame in frames:
                records.extend(pipeline.process(frame))
        return records

    return _run
