# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from dataclasses import dataclass
from typing import List, Sequence
from ..exceptions import ConfigurationError
from ..hashing import ConfigMixin

logger = logging.getLogger(__name__)

MIN_BASELINE_IMAGES = 30


@dataclass(frozen=True)
class CountMonitorConfig(ConfigMixin):
    alarm_drop_fraction: float = 0.5
    window: int = 10

    def __post_init__(self):
        if not 0 < self.alarm_drop_fraction < 1:
            raise ConfigurationError(f'Alarm drop fraction must lie in (0, 1), got {self.alarm_drop_fraction}')
        if self.window < 1:
            raise ConfigurationError(f'Window must be >= 1, got {self.window}')


@dataclass(frozen=True)
class BaselineCountStats():
    mean: float
    std: float
    images: int

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> 'BaselineCountStats':
        if len(counts) < MIN_BASELINE_IMAGES:
            raise ConfigurationError(
                f'Count baseline needs at least {MIN_BASELINE_IMAGES} clean images, got {len(counts)}'
            )
        counts = np.asarray(counts, dtype=np.float64)
        return cls(float(counts.mean()), float(counts.std()), len(counts))


@dataclass(frozen=True)
class WindowVerdict():
    start: int
    stop: int
    mean_count: float
    threshold: float
    alarm: bool


def count_monitor(baseline: BaselineCountStats, observed_counts: Sequence[int],
                  alarm_drop_fraction: float = 0.5, window: int = 10) -> List[WindowVerdict]:
    """Sliding-window count alarm. Sees nothing but per-image detection counts."""
    config = CountMonitorConfig(alarm_drop_fraction, window)
    counts = np.asarray(observed_counts, dtype=np.float64)
    if counts.size == 0:
        return []
    width = min(config.window, counts.size)
    threshold = (1.0 - config.alarm_drop_fraction) * baseline.mean
    means = np.convolve(counts, np.ones(width) / width, mode='valid')
    verdicts = [
        WindowVerdict(start, start + width, float(mean), threshold, bool(mean < threshold))
        for start, mean in enumerate(means)
    ]
    alarms = sum(verdict.alarm for verdict in verdicts)
    if alarms:
        logger.info('Count monitor raised %d alarms over %d windows', alarms, len(verdicts))
    return verdicts
