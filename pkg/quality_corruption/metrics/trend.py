# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import math
import numpy as np
from dataclasses import asdict, dataclass, field
from scipy.stats import spearmanr
from typing import List, Sequence
from .qc import CellResult
from ..exceptions import ConfigurationError, UndefinedMetricError


def _defined_drr(cell: CellResult) -> float:
    try:
        return cell.drr
    except UndefinedMetricError:
        return math.nan


@dataclass
class StepTrend():
    """DRR as a function of attack step count for one model."""

    model_id: str
    steps: List[int] = field(default_factory=list)
    drr: List[float] = field(default_factory=list)
    rho: float = float('nan')
    p_value: float = float('nan')

    @property
    def increasing(self) -> bool:
        return not math.isnan(self.rho) and self.rho > 0

    @property
    def non_decreasing(self) -> bool:
        values = np.asarray(self.drr, dtype=np.float64)
        return bool(np.all(np.isfinite(values)) and np.all(np.diff(values) >= 0))

    def to_dict(self) -> dict:
        content = asdict(self)
        content.update(increasing=self.increasing, non_decreasing=self.non_decreasing)
        return content


def step_trend(cells: Sequence[CellResult]) -> StepTrend:
    """Spearman rank correlation between step count and DRR over cells of one model.

    Cells with an undefined DRR are left out; fewer than two usable cells, or a
    constant DRR, leave ``rho`` as NaN.
    """
    if not cells:
        raise ConfigurationError('A step trend needs at least one cell.')
    identifiers = {cell.model_id for cell in cells}
    if len(identifiers) != 1:
        raise ConfigurationError(f'A step trend covers one model, got {sorted(identifiers)}')
    ordered = sorted(cells, key=lambda cell: cell.steps)
    trend = StepTrend(ordered[0].model_id, [cell.steps for cell in ordered],
                      [_defined_drr(cell) for cell in ordered])
    usable = [(steps, value) for steps, value in zip(trend.steps, trend.drr) if math.isfinite(value)]
    if len(usable) < 2 or len({value for _, value in usable}) < 2:
        return trend
    steps, values = zip(*usable)
    rho, p_value = spearmanr(steps, values)
    trend.rho, trend.p_value = float(rho), float(p_value)
    return trend


@dataclass
class BudgetLadder():
    """Clean mAP followed by attacked mAP at increasing budgets."""

    model_id: str
    map_clean: float
    eps: List[float] = field(default_factory=list)
    map_adv: List[float] = field(default_factory=list)

    @property
    def strictly_decreasing(self) -> bool:
        values = np.asarray([self.map_clean] + self.map_adv, dtype=np.float64)
        return bool(len(values) > 1 and np.all(np.diff(values) < 0))

    def to_dict(self) -> dict:
        content = asdict(self)
        content['strictly_decreasing'] = self.strictly_decreasing
        return content


def budget_ladder(cells: Sequence[CellResult]) -> BudgetLadder:
    if not cells:
        raise ConfigurationError('A budget ladder needs at least one cell.')
    if len({cell.model_id for cell in cells}) != 1 or len({cell.norm for cell in cells}) != 1:
        raise ConfigurationError('A budget ladder covers one model under one norm.')
    ordered = sorted(cells, key=lambda cell: cell.eps)
    return BudgetLadder(ordered[0].model_id, ordered[0].map_clean, [cell.eps for cell in ordered],
                        [cell.map_adv for cell in ordered])
