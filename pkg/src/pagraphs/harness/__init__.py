"""Experiment driver, statistics and the acceptance suite."""
from .acceptance import CHECKS, random_finite_decoration, random_truncation, read_suite, run_check, run_suite
from .config import ExperimentConfig, read_config
from .experiment import CSV_COLUMNS, DiagnosticResult, StatReport, run_experiment, worker_count
from .models import MODELS, STATISTICS, build, statistic
from .stats import DistanceSummary, Histogram, distance_stats, fixed_histogram, loglog_slope, wasserstein1
