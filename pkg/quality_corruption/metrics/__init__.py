from .cells import build_cell, group_by_image, per_image_qci_values
from .monitor import BaselineCountStats, CountMonitorConfig, WindowVerdict, count_monitor
from .qc import (
    CellResult, FailureMode, FailureModeThresholds, PerImageQCI, classify_failure_mode, drr,
    map_drop_pct, per_image_qci, qci
)
from .signals import DistributionSignals, QCISummary, distribution_signals, summarize_per_image_qci
from .trend import BudgetLadder, StepTrend, budget_ladder, step_trend
