from .config import ExperimentConfig, SynthConfig, lambda_range, parse_grid, parse_lengths
from .synth import synth_generate
from .runner import (
    MetricSummary,
    SweepResult,
    aggregate,
    evaluate_split,
    find_optimum,
    refine_optimum,
    run_once,
    sweep,
)
from .report import emit_report

__all__ = [
    'ExperimentConfig',
    'SynthConfig',
    'lambda_range',
    'parse_grid',
    'parse_lengths',
    'synth_generate',
    'MetricSummary',
    'SweepResult',
    'aggregate',
    'evaluate_split',
    'find_optimum',
    'refine_optimum',
    'run_once',
    'sweep',
    'emit_report',
]
