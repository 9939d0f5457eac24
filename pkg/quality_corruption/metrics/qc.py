# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import math
from dataclasses import dataclass
from typing import Optional, Sequence
from . import metrics_mapping
from ..evaluation import Detection, GroundTruth, per_image_precision
from ..exceptions import ConfigurationError, UndefinedMetricError
from ..hashing import ConfigMixin


def drr(count_clean: int, count_adv: int) -> float:
    """Detection Rate Reduction in percent; negative when the attack adds detections."""
    if count_clean < 1:
        raise UndefinedMetricError('DRR is undefined without clean detections.')
    return (1.0 - count_adv / count_clean) * 100.0


def map_drop_pct(map_clean: float, map_adv: float) -> float:
    if not map_clean > 0:
        raise UndefinedMetricError('Relative mAP drop is undefined for a zero clean mAP.')
    return (1.0 - map_adv / map_clean) * 100.0


def qci(map_clean: float, map_adv: float, drr_value: float) -> float:
    """Quality Corruption Index: relative mAP drop minus DRR, both in percent."""
    return map_drop_pct(map_clean, map_adv) - drr_value


@dataclass(frozen=True)
class FailureModeThresholds(ConfigMixin):
    qc_tau: float = 20.0
    drr_tau: float = 50.0
    suppression_drr: float = 80.0

    def __post_init__(self):
        if self.drr_tau >= self.suppression_drr:
            raise ConfigurationError('The QC DRR ceiling must lie below the suppression DRR floor.')


@dataclass(frozen=True)
class FailureMode():
    label: str
    qci: float
    drr: float


def classify_failure_mode(qci_value: float, drr_value: float,
                          thresholds: FailureModeThresholds = FailureModeThresholds()) -> FailureMode:
    if drr_value >= thresholds.suppression_drr:
        label = 'Suppression'
    elif qci_value >= thresholds.qc_tau and drr_value <= thresholds.drr_tau:
        label = 'QualityCorruption'
    else:
        label = 'Coupled'
    return FailureMode(label, qci_value, drr_value)


@dataclass(frozen=True)
class CellResult():
    """One model x attack cell; the clean baseline it is measured against travels with it."""

    model_id: str
    map_clean: float
    map_adv: float
    count_clean: int
    count_adv: int
    norm: str = 'linf'
    eps: float = 0.0
    steps: int = 0
    loss: str = 'det_sum'

    def __post_init__(self):
        for name in ('map_clean', 'map_adv'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f'{name} must lie in [0, 1], got {value}')
        if self.count_clean < 0 or self.count_adv < 0:
            raise ConfigurationError('Detection counts must be non-negative.')

    @property
    def drr(self) -> float:
        return drr(self.count_clean, self.count_adv)

    @property
    def map_drop_pct(self) -> float:
        return map_drop_pct(self.map_clean, self.map_adv)

    @property
    def qci(self) -> float:
        return qci(self.map_clean, self.map_adv, self.drr)

    @property
    def negative_drop(self) -> bool:
        return self.map_adv > self.map_clean

    def failure_mode(self, thresholds: FailureModeThresholds = FailureModeThresholds()) -> FailureMode:
        return classify_failure_mode(self.qci, self.drr, thresholds)

    def to_row(self, thresholds: FailureModeThresholds = FailureModeThresholds()) -> dict:
        row = {
            'model': self.model_id,
            'norm': self.norm,
            'eps': self.eps,
            'steps': self.steps,
            'loss': self.loss,
            'map_clean': self.map_clean,
            'map_adv': self.map_adv,
            'count_clean': self.count_clean,
            'count_adv': self.count_adv
        }
        try:
            row['drr'] = self.drr
            row['map_drop_pct'] = self.map_drop_pct
            row['qci'] = self.qci
            row['mode'] = classify_failure_mode(row['qci'], row['drr'], thresholds).label
        except UndefinedMetricError:
            row.update({'drr': math.nan, 'map_drop_pct': math.nan, 'qci': math.nan, 'mode': 'Undefined'})
        ordered = {column: row[column] for column in metrics_mapping.report_columns}
        ordered['negative_drop'] = self.negative_drop
        return ordered


@dataclass(frozen=True)
class PerImageQCI():
    image_id: int
    value: Optional[float] = None
    excluded: Optional[str] = None

    @property
    def included(self) -> bool:
        return self.excluded is None


def per_image_qci(dets_clean: Sequence[Detection], dets_adv: Sequence[Detection],
                  gts: Sequence[GroundTruth], image_id: int = 0) -> PerImageQCI:
    """Per-image QCI from post-NMS detections; precision stands in for mAP."""
    if not dets_clean:
        return PerImageQCI(image_id, excluded='no_clean_detections')
    precision_clean = per_image_precision(dets_clean, gts)
    if not precision_clean:
        return PerImageQCI(image_id, excluded='zero_clean_precision')
    # an attack that leaves nothing has no correct detection
    precision_adv = per_image_precision(dets_adv, gts) or 0.0
    value = (1.0 - precision_adv / precision_clean) * 100.0 - drr(len(dets_clean), len(dets_adv))
    return PerImageQCI(image_id, value)
