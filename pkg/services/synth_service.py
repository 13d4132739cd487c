"""
SynthService: renders a scenario file to PGM frames, truth.csv and zones.json.
"""

from pathlib import Path

from core import AbstractService
from synth.scene_synth import load_scenario, write_scenario


class SynthService(AbstractService):

    def __init__(self, config, spec_path: str, out_dir: str):
        super().__init__("synth", config)
        self.spec_path = spec_path
        self.out_dir = Path(out_dir)

    def execute(self) -> dict:
        spec = load_scenario(self.spec_path)
        self.log(
            "INFO",
            f"Rendering {spec.frames} frames {spec.width}x{spec.height}, "
            f"{len(spec.vehicles)} vehicles, seed {spec.seed} -> {self.out_dir}",
        )
        written = write_scenario(spec, self.out_dir)
        self.log("INFO", f"Wrote {len(written['frames'])} frames, {written['truth']}, {written['zones']}")
        return written
