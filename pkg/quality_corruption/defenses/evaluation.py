# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union
from . import purification_mapping
from .purification import Purifier
from ..attacks import AttackConfig, AttackOutcome, apply_perturbations, evaluate_attack
from ..detector import SpikingModel, run_protocol, stack_samples
from ..evaluation import DetectionSample, map50
from ..exceptions import ConfigurationError, UndefinedMetricError
from ..hashing import ConfigMixin
from ..metrics import CellResult

logger = logging.getLogger(__name__)

Defense = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class VerdictThresholds(ConfigMixin):
    recovery_fraction: float = 0.5
    drr_shift: float = 20.0

    def __post_init__(self):
        if not 0 < self.recovery_fraction <= 1:
            raise ConfigurationError(f'Recovery fraction must lie in (0, 1], got {self.recovery_fraction}')


@dataclass
class DefenseEvaluation():
    defense: str
    undefended: CellResult
    defended: CellResult
    verdict: str
    map_clean_purified: Optional[float] = None

    def to_row(self) -> dict:
        row = self.defended.to_row()
        row['defense'] = self.defense
        row['verdict'] = self.verdict
        row['drr_undefended'] = self.undefended.to_row()['drr']
        row['map_adv_undefended'] = self.undefended.map_adv
        row['map_clean_purified'] = self.map_clean_purified
        return row


def defense_verdict(undefended: CellResult, defended: CellResult,
                    thresholds: VerdictThresholds = VerdictThresholds()) -> str:
    """Verdict derived from the paired rows alone."""
    recovered = defended.map_adv >= thresholds.recovery_fraction * undefended.map_clean
    if recovered and defended.map_adv > undefended.map_adv:
        return purification_mapping.verdict_labels['restored']
    try:
        shift = defended.drr - undefended.drr
    except UndefinedMetricError:
        return purification_mapping.verdict_labels['none']
    if shift >= thresholds.drr_shift:
        return purification_mapping.verdict_labels['shifted']
    return purification_mapping.verdict_labels['none']


def _defense_name(defense: Union[str, Defense]) -> str:
    if isinstance(defense, Purifier):
        return defense.name
    return getattr(defense, '__name__', type(defense).__name__)


def evaluate_defense(model: SpikingModel, defense: Union[str, Defense], attack_cfg: AttackConfig,
                     samples: Sequence[DetectionSample], thresholds: VerdictThresholds = VerdictThresholds(),
                     outcome: Optional[AttackOutcome] = None) -> DefenseEvaluation:
    """Undefended vs defended cell for a non-adaptive attack.

    The attack is crafted on the bare model; the defended cell keeps the
    undefended clean baseline and measures the model on purified adversarial
    inputs.
    """
    if isinstance(defense, str):
        defense = Purifier(defense)
    if outcome is None:
        outcome = evaluate_attack(model, samples, attack_cfg)
    undefended = outcome.cell
    images, image_ids, gts = stack_samples(samples)
    purified_adversarial = defense(apply_perturbations(samples, outcome.perturbations))
    adversarial = run_protocol(model, purified_adversarial, image_ids)
    name = _defense_name(defense)
    defended = CellResult(
        model_id=f'{model.model_id}+{name}',
        map_clean=undefended.map_clean,
        map_adv=map50(adversarial.all_ranked(), gts),
        count_clean=undefended.count_clean,
        count_adv=adversarial.total_count,
        norm=undefended.norm,
        eps=undefended.eps,
        steps=undefended.steps,
        loss=undefended.loss
    )
    purified_clean = run_protocol(model, defense(images), image_ids)
    verdict = defense_verdict(undefended, defended, thresholds)
    logger.info('Defense %s on %s: %s', name, model.model_id, verdict)
    return DefenseEvaluation(name, undefended, defended, verdict, map50(purified_clean.all_ranked(), gts))


def purification_grid(model: SpikingModel, attack_cfg: AttackConfig, samples: Sequence[DetectionSample],
                      methods: Optional[Sequence[str]] = None,
                      thresholds: VerdictThresholds = VerdictThresholds(),
                      outcome: Optional[AttackOutcome] = None) -> List[DefenseEvaluation]:
    """One verdict row per catalog method, all against the same perturbations."""
    if methods is None:
        methods = [name for name in purification_mapping.purification_catalog if name != 'identity']
    if outcome is None:
        outcome = evaluate_attack(model, samples, attack_cfg)
    return [evaluate_defense(model, name, attack_cfg, samples, thresholds, outcome) for name in methods]
