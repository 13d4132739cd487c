"""
Synthetic traffic scenes, the reference detector and interval evaluation.
"""

from .scene_synth import (
    GroundTruth,
    ScenarioSpec,
    VehicleEvent,
    ReflectionEvent,
    Headlights,
    generate_sequence,
    iter_frames,
    compute_truth,
    load_scenario,
    write_scenario,
)
from .naive_reference import naive_reference
from .evaluation import EvaluationReport, evaluate_intervals, evaluate_files

__all__ = [
    'GroundTruth',
    'ScenarioSpec',
    'VehicleEvent',
    'ReflectionEvent',
    'Headlights',
    'generate_sequence',
    'iter_frames',
    'compute_truth',
    'load_scenario',
    'write_scenario',
    'naive_reference',
    'EvaluationReport',
    'evaluate_intervals',
    'evaluate_files',
]
