# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from tqdm import tqdm
from typing import List, Optional, Sequence, Tuple
from . import attack_mapping, gradient
from .config import AttackConfig, Perturbation, project
from ..detector import ProtocolDetections, SpikingModel, run_protocol, stack_samples
from ..evaluation import DetectionSample
from ..exceptions import TransferContractError
from ..metrics import (
    BudgetLadder, CellResult, PerImageQCI, StepTrend, budget_ladder, build_cell, per_image_qci_values, step_trend
)

logger = logging.getLogger(__name__)


@dataclass
class AttackOutcome():
    cell: CellResult
    per_image: List[PerImageQCI] = field(default_factory=list)
    perturbations: List[Perturbation] = field(default_factory=list)
    clean: Optional[ProtocolDetections] = None
    adversarial: Optional[ProtocolDetections] = None


def attack_image(model: SpikingModel, image: np.ndarray, cfg: AttackConfig, image_id: int = 0) -> Perturbation:
    attack = getattr(gradient, attack_mapping.method_mapping[(cfg.method, cfg.norm)])
    return attack(model, image, cfg, image_id)


def attack_images(model: SpikingModel, samples: Sequence[DetectionSample], cfg: AttackConfig,
                  workers: int = 1, progress: bool = False) -> List[Perturbation]:
    """Per-image attacks; independent tasks sharing read-only weights."""
    def run(sample):
        return attack_image(model, sample.image, cfg, sample.image_id)
    description = f'{cfg.label} eps={cfg.eps:g} on {model.model_id}'
    if workers <= 1:
        return [run(sample) for sample in tqdm(samples, desc=description, disable=not progress)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(run, samples), total=len(samples), desc=description, disable=not progress))


def apply_perturbations(samples: Sequence[DetectionSample], perturbations: Sequence[Perturbation]) -> np.ndarray:
    return np.stack([
        perturbation.apply(sample.image) for sample, perturbation in zip(samples, perturbations)
    ])


def _outcome(model: SpikingModel, samples: Sequence[DetectionSample], perturbations: List[Perturbation],
             cfg: AttackConfig, clean: Optional[ProtocolDetections] = None,
             loss_label: Optional[str] = None) -> AttackOutcome:
    images, image_ids, gts = stack_samples(samples)
    if clean is None:
        clean = run_protocol(model, images, image_ids)
    adversarial = run_protocol(model, apply_perturbations(samples, perturbations), image_ids)
    descriptor = cfg.descriptor()
    if loss_label is not None:
        descriptor['loss'] = loss_label
    cell = build_cell(model.model_id, clean, adversarial, gts, **descriptor)
    return AttackOutcome(cell, per_image_qci_values(clean, adversarial, gts), perturbations, clean, adversarial)


def evaluate_attack(model: SpikingModel, samples: Sequence[DetectionSample], cfg: AttackConfig,
                    workers: int = 1, clean: Optional[ProtocolDetections] = None,
                    progress: bool = False) -> AttackOutcome:
    """White-box attack on every image, then clean vs adversarial evaluation."""
    perturbations = attack_images(model, samples, cfg, workers, progress)
    return _outcome(model, samples, perturbations, cfg, clean)


def transfer(source: SpikingModel, target: SpikingModel, samples: Sequence[DetectionSample],
             cfg: AttackConfig, workers: int = 1) -> AttackOutcome:
    """Craft on ``source``, evaluate on ``target`` without any target gradient query."""
    if source is target or source.model_id == target.model_id:
        logger.warning('Transfer from %s onto itself is a white-box run', source.model_id)
    queries_before = target.gradient_queries
    perturbations = attack_images(source, samples, cfg, workers)
    if source is not target and target.gradient_queries != queries_before:
        raise TransferContractError(
            f'Target {target.model_id} answered {target.gradient_queries - queries_before} gradient queries while crafting'
        )
    queries_before = target.gradient_queries
    outcome = _outcome(target, samples, perturbations, cfg, loss_label=f'transfer:{source.model_id}/{cfg.label}')
    if target.gradient_queries != queries_before:
        raise TransferContractError(
            f'Target {target.model_id} answered {target.gradient_queries - queries_before} gradient queries'
        )
    return outcome


def random_noise_control(target: SpikingModel, samples: Sequence[DetectionSample],
                         cfg: AttackConfig) -> AttackOutcome:
    """Random-sign (linf) or random-direction (L2) noise at the full budget."""
    perturbations = []
    for sample in samples:
        rng = np.random.default_rng([cfg.seed, sample.image_id])
        if cfg.norm == 'linf':
            delta = cfg.radius * rng.choice([-1.0, 1.0], size=sample.image.shape)
        else:
            direction = rng.normal(size=sample.image.shape)
            delta = cfg.radius * direction / np.linalg.norm(direction)
        delta = project(delta, sample.image.astype(np.float64), cfg.norm, cfg.radius)
        perturbations.append(Perturbation(delta, 'random', cfg, sample.image_id))
    return _outcome(target, samples, perturbations, cfg, loss_label='random')


def strength_trend(model: SpikingModel, samples: Sequence[DetectionSample], cfg: AttackConfig,
                   step_counts: Sequence[int] = attack_mapping.TREND_STEPS, workers: int = 1,
                   clean: Optional[ProtocolDetections] = None,
                   progress: bool = False) -> Tuple[StepTrend, List[AttackOutcome]]:
    """Same attack at growing step counts; DRR against steps as a rank correlation."""
    if clean is None:
        images, image_ids, _ = stack_samples(samples)
        clean = run_protocol(model, images, image_ids)
    outcomes = [
        evaluate_attack(model, samples, replace(cfg, steps=steps), workers, clean, progress)
        for steps in sorted(step_counts)
    ]
    trend = step_trend([outcome.cell for outcome in outcomes])
    logger.info('%s: DRR %s over steps %s, Spearman rho %.3f', model.model_id,
                ['%.1f' % value for value in trend.drr], trend.steps, trend.rho)
    return trend, outcomes


def budget_sweep(model: SpikingModel, samples: Sequence[DetectionSample], cfg: AttackConfig,
                 eps_values: Sequence[float] = attack_mapping.LADDER_EPS, workers: int = 1,
                 clean: Optional[ProtocolDetections] = None,
                 progress: bool = False) -> Tuple[BudgetLadder, List[AttackOutcome]]:
    """Same attack at growing budgets, sharing one clean pass."""
    if clean is None:
        images, image_ids, _ = stack_samples(samples)
        clean = run_protocol(model, images, image_ids)
    outcomes = [
        evaluate_attack(model, samples, replace(cfg, eps=eps), workers, clean, progress)
        for eps in sorted(eps_values)
    ]
    return budget_ladder([outcome.cell for outcome in outcomes]), outcomes
