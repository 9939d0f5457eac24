from .adversarial import (
    ATConfig, TRAJECTORY_COLUMNS, TrajectoryRow, adversarial_train, adversarial_train_grid, copy_model,
    write_trajectory
)
from .certification import (
    CertificationComparison, FrameworkEvidence, certification_comparison, framework_table
)
from .evaluation import (
    DefenseEvaluation, VerdictThresholds, defense_verdict, evaluate_defense, purification_grid
)
from .purification import PurifyMethod, Purifier, catalog, purify
