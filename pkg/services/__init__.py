"""
Command-line services of the vehicle-presence detector.
"""

from .detection_service import DetectionService, DetectionResult, run_detection
from .benchmark_service import BenchmarkService, BenchmarkReport, run_benchmark
from .synth_service import SynthService
from .evaluation_service import EvaluationService

__all__ = [
    'DetectionService',
    'DetectionResult',
    'run_detection',
    'BenchmarkService',
    'BenchmarkReport',
    'run_benchmark',
    'SynthService',
    'EvaluationService',
]
