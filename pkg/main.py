import sys

import fire

from launcher import VloopLauncher


def detect(input=None, zones=None, out=None, calib_interval=None, overlay_dir=None, snapshot_dir=None, config=None):
    """
    Run the detector over a frame sequence and write the occupancy CSV

    Args:
        input: frame pattern (frame_%06d.pgm), directory, glob or raw:path:WxH
        zones: zone file (JSON)
        out: output CSV path
        calib_interval: frames between colour calibrations
        overlay_dir: write a debug overlay per frame into this directory
        snapshot_dir: write accumulator snapshots at end of stream
        config: named config overlay (e.g. 'night', 'bench')
    """
    sys.exit(VloopLauncher(config).detect(input, zones, out, calib_interval, overlay_dir, snapshot_dir))


def synth(spec, out_dir, config=None):
    """Render a scenario file to numbered PGM frames, truth.csv and zones.json"""
    sys.exit(VloopLauncher(config).synth(spec, out_dir))


def bench(frames=None, size=None, zones=None, input=None, config=None):
    """Measure throughput on preloaded frames (synthetic 768x512 scene by default)"""
    sys.exit(VloopLauncher(config).bench(frames, size, zones, input))


def evaluate(records, truth, fps=25.0, interval_s=2.0, config=None):
    """2-second-interval error rates of an occupancy CSV against truth.csv"""
    sys.exit(VloopLauncher(config).evaluate(records, truth, fps, interval_s))


if __name__ == "__main__":
    fire.Fire(
        {
            "detect": detect,
            "synth": synth,
            "bench": bench,
            "evaluate": evaluate,
        }
    )
