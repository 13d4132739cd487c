"""
Console reports of the command-line services.
"""

import sys

from core.constants import Formats


class Colors:
    """Simple color codes"""

    RED = "\033[91m"
    GREEN = "\033[92m"
    YELLOW = "\033[93m"
    CYAN = "\033[96m"
    BOLD = "\033[1m"
    RESET = "\033[0m"


def colorize(text: str, color: str, stream=None) -> str:
    """Add color to text when the stream is a terminal"""
    stream = stream or sys.stdout
    if not getattr(stream, "isatty", lambda: False)():
        return text
    return f"{color}{text}{Colors.RESET}"


def print_error(message: str):
    print(colorize(f"error: {message}", Colors.RED + Colors.BOLD, sys.stderr), file=sys.stderr)


def format_benchmark(report) -> str:
    lines = [
        f"frames      {report.frames}",
        f"frame size  {report.width}x{report.height}",
        f"zones       {report.zones} ({report.zone_pixels} pixels)",
        f"elapsed     {report.elapsed_s:.3f} s",
        f"throughput  {report.fps:.1f} fps",
        "per-stage microseconds per frame:",
    ]
    for stage, micros in report.stages.items():
        lines.append(f"  {stage:<11} {micros:10.1f}")
    return "\n".join(lines)


def print_benchmark(report, target_fps: float):
    print(colorize("Benchmark", Colors.CYAN + Colors.BOLD))
    print(format_benchmark(report))
    verdict = Colors.GREEN if report.fps >= target_fps else Colors.YELLOW
    print(colorize(f"real-time bar {target_fps:g} fps: {'met' if report.fps >= target_fps else 'missed'}", verdict))


def print_evaluation(report):
    print(colorize("Interval evaluation", Colors.CYAN + Colors.BOLD))
    print(report.per_zone.to_string(float_format=lambda v: Formats.FLOAT_FORMAT % v))
    print(
        f"overall: {report.intervals} intervals, {report.false_negatives} FN, "
        f"{report.false_positives} FP, error rate {report.error_rate:.4f}"
    )


def print_detection(result):
    print(colorize(f"{result.frames} frames, {len(result.activations)} zones -> {result.out}", Colors.GREEN))
    for zone_id, pulses in result.activations.items():
        print(f"  {zone_id}: {pulses} activations")
