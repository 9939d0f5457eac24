# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
from . import purification_mapping
from .adversarial import TrajectoryRow
from .evaluation import DefenseEvaluation
from ..attacks import AttackConfig, evaluate_attack
from ..detector import SpikingModel, run_protocol, stack_samples
from ..evaluation import DetectionSample
from ..metrics import CellResult, FailureModeThresholds, WindowVerdict

logger = logging.getLogger(__name__)

# name -> (method, steps)
DEFAULT_CERTIFICATION_ATTACKS = (
    ('PGD-10', 'pgd', 10),
    ('PGD-100', 'pgd', 100),
    ('APGD-100', 'apgd', 100)
)


@dataclass
class CertificationComparison():
    cells: Dict[str, CellResult] = field(default_factory=dict)
    worst: str = ''
    most_detectable: str = ''
    least_detectable: str = ''
    weakest: str = ''

    @property
    def bounds_wrong_direction(self) -> bool:
        """The weakest configuration does the most damage."""
        return bool(self.cells) and self.worst == self.weakest and len(self.cells) > 1

    def to_rows(self) -> List[dict]:
        rows = []
        for name, cell in self.cells.items():
            row = cell.to_row()
            row['attack'] = name
            row['worst'] = name == self.worst
            row['least_detectable'] = name == self.least_detectable
            rows.append(row)
        return rows


def _finite(value: float) -> float:
    return value if not math.isnan(value) else -math.inf


def certification_comparison(model: SpikingModel, samples: Sequence[DetectionSample], eps: float,
                             norm: str = 'linf',
                             attacks: Sequence[Tuple[str, str, int]] = DEFAULT_CERTIFICATION_ATTACKS,
                             seed: int = 0) -> CertificationComparison:
    """Empirical certification check: is the strongest attack also the worst case?"""
    images, image_ids, _ = stack_samples(samples)
    clean = run_protocol(model, images, image_ids)
    comparison = CertificationComparison()
    for name, method, steps in attacks:
        cfg = AttackConfig(norm=norm, eps=eps, steps=steps, method=method, seed=seed)
        comparison.cells[name] = evaluate_attack(model, samples, cfg, clean=clean).cell
    rows = {name: cell.to_row() for name, cell in comparison.cells.items()}
    comparison.worst = max(rows, key=lambda name: _finite(rows[name]['map_drop_pct']))
    comparison.most_detectable = max(rows, key=lambda name: _finite(rows[name]['drr']))
    comparison.least_detectable = max(rows, key=lambda name: _finite(rows[name]['qci']))
    comparison.weakest = min(attacks, key=lambda attack: (attack[2], attack[1] != 'pgd'))[0]
    logger.info('Certification on %s: worst %s, most detectable %s', model.model_id,
                comparison.worst, comparison.most_detectable)
    return comparison


@dataclass
class FrameworkEvidence():
    attack_cell: CellResult
    monitor_verdicts: Sequence[WindowVerdict] = ()
    purification: Sequence[DefenseEvaluation] = ()
    trajectory: Sequence[TrajectoryRow] = ()
    certification: Optional[CertificationComparison] = None
    thresholds: FailureModeThresholds = field(default_factory=FailureModeThresholds)


def _drr_metric_row(evidence: FrameworkEvidence) -> Tuple[str, str]:
    row = evidence.attack_cell.to_row(evidence.thresholds)
    observed = f"DRR = {row['drr']:.1f}%, mAP drop = {row['map_drop_pct']:.1f}%"
    blind = row['mode'] == 'QualityCorruption'
    return observed, 'Metric blind' if blind else 'As designed'


def _count_monitor_row(evidence: FrameworkEvidence) -> Tuple[str, str]:
    row = evidence.attack_cell.to_row(evidence.thresholds)
    alarms = sum(verdict.alarm for verdict in evidence.monitor_verdicts)
    if not evidence.monitor_verdicts:
        return 'not run', 'Not evaluated'
    if alarms:
        return f"Count dropped (DRR = {row['drr']:.1f}%), {alarms} alarms", 'As designed'
    observed = f"Count preserved (DRR = {row['drr']:.1f}%)"
    return observed, 'Silent' if row['mode'] != 'Suppression' and row['map_drop_pct'] > row['drr'] else 'As designed'


def _purification_row(evidence: FrameworkEvidence) -> Tuple[str, str]:
    if not evidence.purification:
        return 'not run', 'Not evaluated'
    best = max(evidence.purification, key=lambda item: item.defended.map_adv)
    observed = f'{best.defense}: mAP = {best.defended.map_adv:.3f}'
    verdicts = {item.verdict for item in evidence.purification}
    labels = purification_mapping.verdict_labels
    if labels['restored'] in verdicts:
        return observed, 'As designed'
    if verdicts == {labels['shifted']}:
        return observed, 'All shift mode; none restores accuracy'
    return observed, 'No restoration'


def _adversarial_training_row(evidence: FrameworkEvidence) -> Tuple[str, str]:
    if len(evidence.trajectory) < 2:
        return 'not run', 'Not evaluated'
    first, last = evidence.trajectory[0], evidence.trajectory[-1]
    observed = (f'Clean {last.map_clean - first.map_clean:+.2f}; PGD {last.map_pgd - first.map_pgd:+.2f}; '
                f'{first.mode} -> {last.mode}')
    if last.map_pgd > first.map_pgd:
        return observed, 'As designed'
    if last.mode == 'Suppression' and last.map_clean < first.map_clean:
        return observed, 'Destroys detector'
    return observed, 'No trade-off'


def _certification_row(evidence: FrameworkEvidence) -> Tuple[str, str]:
    comparison = evidence.certification
    if comparison is None or not comparison.cells:
        return 'not run', 'Not evaluated'
    observed = f'{comparison.worst} worst; {comparison.most_detectable} most detectable'
    return observed, 'Bounds wrong direction' if comparison.bounds_wrong_direction else 'As designed'


_framework_rows = {
    'DRR metric': _drr_metric_row,
    'Count monitoring': _count_monitor_row,
    'Input purification': _purification_row,
    'Adversarial training': _adversarial_training_row,
    'eps-certification': _certification_row
}


def framework_table(evidence: FrameworkEvidence) -> List[dict]:
    """Five-component robustness framework: expected behaviour next to the observed one."""
    table = []
    for component, expected in purification_mapping.framework_expectations.items():
        observed, failure = _framework_rows[component](evidence)
        table.append({'component': component, 'expected': expected, 'observed': observed, 'failure': failure})
    return table
