# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
from dataclasses import dataclass, field
from typing import List, Optional
from .coco import JsonSource, load_coco
from ..evaluation import EVAL_CONFIDENCE, INFERENCE_CONFIDENCE, MATCH_IOU, NMS_IOU
from ..exceptions import ConfigurationError
from ..metrics import (
    BaselineCountStats, CellResult, CountMonitorConfig, DistributionSignals, FailureModeThresholds,
    PerImageQCI, QCISummary, WindowVerdict, build_cell, count_monitor, distribution_signals,
    per_image_qci_values, summarize_per_image_qci
)

logger = logging.getLogger(__name__)


@dataclass
class AuditReport():
    cell: CellResult
    per_image: List[PerImageQCI]
    qci_summary: QCISummary
    signals_clean: DistributionSignals
    signals_adv: DistributionSignals
    monitor_verdicts: List[WindowVerdict] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)

    @property
    def monitor_alarms(self) -> int:
        return sum(verdict.alarm for verdict in self.monitor_verdicts)

    def to_dict(self) -> dict:
        return {
            'row': self.cell.to_row(FailureModeThresholds(**self.thresholds['failure_mode'])),
            'qci_summary': self.qci_summary.to_dict(),
            'per_image': [
                {'image_id': value.image_id, 'qci': value.value, 'excluded': value.excluded}
                for value in self.per_image
            ],
            'signals': {'clean': self.signals_clean.to_dict(), 'adversarial': self.signals_adv.to_dict()},
            'monitor': {
                'windows': len(self.monitor_verdicts),
                'alarms': self.monitor_alarms
            },
            'errors': self.errors,
            'warnings': self.warnings,
            'thresholds': self.thresholds
        }


def audit(annotations: JsonSource, clean_dump: JsonSource, adv_dump: JsonSource,
          model_id: str = 'external', thresholds: FailureModeThresholds = FailureModeThresholds(),
          monitor: CountMonitorConfig = CountMonitorConfig(), conf_thresh: float = INFERENCE_CONFIDENCE,
          strict: bool = True) -> AuditReport:
    """QC audit of an external detector from its clean and attacked result dumps.

    The count monitor is calibrated on the clean dump; with fewer clean images
    than the monitor baseline needs, it is skipped with a warning.
    """
    inputs = load_coco(annotations, clean_dump, adv_dump, conf_thresh, strict)
    gts = inputs.annotations.gts
    cell = build_cell(model_id, inputs.clean, inputs.adversarial, gts, norm='external', loss='dump')
    per_image = per_image_qci_values(inputs.clean, inputs.adversarial, gts)
    warnings = list(inputs.warnings)
    verdicts: List[WindowVerdict] = []
    clean_counts = [inputs.clean.counts()[image_id] for image_id in inputs.clean.image_ids]
    try:
        baseline: Optional[BaselineCountStats] = BaselineCountStats.from_counts(clean_counts)
    except ConfigurationError as error:
        baseline = None
        warnings.append(f'Count monitor skipped: {error}')
        logger.warning('Count monitor skipped: %s', error)
    if baseline is not None:
        adversarial_counts = [inputs.adversarial.counts()[image_id] for image_id in inputs.adversarial.image_ids]
        verdicts = count_monitor(baseline, adversarial_counts, monitor.alarm_drop_fraction, monitor.window)
    report = AuditReport(
        cell=cell,
        per_image=per_image,
        qci_summary=summarize_per_image_qci(per_image),
        signals_clean=distribution_signals(inputs.clean.all_emitted()),
        signals_adv=distribution_signals(inputs.adversarial.all_emitted()),
        monitor_verdicts=verdicts,
        errors=inputs.errors,
        warnings=warnings,
        thresholds={
            'failure_mode': thresholds.to_plain(),
            'monitor': monitor.to_plain(),
            'inference_confidence': conf_thresh,
            'eval_confidence': EVAL_CONFIDENCE,
            'nms_iou': NMS_IOU,
            'match_iou': MATCH_IOU
        }
    )
    logger.info('Audit of %s: %s', model_id, cell.to_row(thresholds)['mode'])
    return report
