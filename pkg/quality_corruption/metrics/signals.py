# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from collections import Counter
from dataclasses import asdict, dataclass, field
from scipy.stats import entropy
from typing import List, Sequence
from . import metrics_mapping
from .qc import PerImageQCI
from ..evaluation import Detection


@dataclass(frozen=True)
class DistributionSignals():
    count: int
    mean_confidence: float
    mean_box_area: float
    class_entropy: float

    def to_dict(self) -> dict:
        return asdict(self)


def distribution_signals(dets: Sequence[Detection]) -> DistributionSignals:
    """Raw signals a distributional QC detector would consume; entropy in bits."""
    if not dets:
        return DistributionSignals(0, 0.0, 0.0, 0.0)
    classes = Counter(det.class_id for det in dets)
    return DistributionSignals(
        count=len(dets),
        mean_confidence=float(np.mean([det.confidence for det in dets])),
        mean_box_area=float(np.mean([det.box.area for det in dets])),
        class_entropy=float(entropy(list(classes.values()), base=2))
    )


@dataclass
class QCISummary():
    count: int = 0
    excluded_no_detections: int = 0
    excluded_zero_precision: int = 0
    corruption_fraction: float = 0.0
    suppression_fraction: float = 0.0
    median: float = float('nan')
    minimum: float = float('nan')
    maximum: float = float('nan')
    bin_edges: List[float] = field(default_factory=list)
    bin_counts: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def summarize_per_image_qci(values: Sequence[PerImageQCI],
                            bins: int = metrics_mapping.QCI_HISTOGRAM_BINS) -> QCISummary:
    summary = QCISummary(
        excluded_no_detections=sum(value.excluded == 'no_clean_detections' for value in values),
        excluded_zero_precision=sum(value.excluded == 'zero_clean_precision' for value in values)
    )
    included = np.array([value.value for value in values if value.included], dtype=np.float64)
    summary.count = int(included.size)
    if not included.size:
        return summary
    summary.corruption_fraction = float(np.mean(included > 0))
    summary.suppression_fraction = float(np.mean(included < 0))
    summary.median = float(np.median(included))
    summary.minimum = float(included.min())
    summary.maximum = float(included.max())
    counts, edges = np.histogram(included, bins=bins)
    summary.bin_counts = counts.tolist()
    summary.bin_edges = edges.tolist()
    return summary
