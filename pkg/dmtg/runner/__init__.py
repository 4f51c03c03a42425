"""
Experiment orchestration, persistence, reporting and the command line.
"""

from .records import RESULT_COLUMNS, RELATIVE_ENCODER_COMPLEXITY, RunRecord
from .results_writer import ResultsWriter, read_records
from .pipeline import ExperimentRunner, SeedRun, run, run_seed
from .report import Report, report
from .checks import CheckResult, run_checks

__all__ = [
    'RESULT_COLUMNS', 'RELATIVE_ENCODER_COMPLEXITY', 'RunRecord',
    'ResultsWriter', 'read_records',
    'ExperimentRunner', 'SeedRun', 'run', 'run_seed',
    'Report', 'report',
    'CheckResult', 'run_checks',
]
