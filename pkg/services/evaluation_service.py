"""
EvaluationService: interval error rates of an occupancy CSV against truth.csv.
"""

from core import AbstractService
from synth.evaluation import EvaluationReport, evaluate_files


class EvaluationService(AbstractService):

    def __init__(self, config, records: str, truth: str, fps: float = 25.0, interval_s: float = 2.0):
        super().__init__("evaluation", config)
        self.records = records
        self.truth = truth
        self.fps = fps
        self.interval_s = interval_s

    def execute(self) -> EvaluationReport:
        report = evaluate_files(self.records, self.truth, self.fps, self.interval_s)
        self.log(
            "INFO",
            f"{report.intervals} intervals: {report.false_negatives} FN, {report.false_positives} FP, "
            f"error rate {report.error_rate:.4f}",
        )
        return report
