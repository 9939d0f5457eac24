# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import csv
import logging
import numpy as np
from dataclasses import asdict, dataclass, field
from pathlib import Path
from tqdm import tqdm
from typing import Dict, List, Optional, Sequence, Tuple, Union
from . import purification_mapping
from ..attacks import AttackConfig, attack_images, evaluate_attack
from ..detector import Adam, SpikingModel, TrainingHyper, build_detector, training_step
from ..evaluation import DetectionSample
from ..exceptions import ConfigurationError, DivergenceError, NonFiniteError
from ..hashing import ConfigMixin
from ..metrics import FailureModeThresholds

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = (
    'epoch', 'map_clean', 'map_pgd', 'count_clean', 'count_pgd', 'drr', 'qci', 'mode'
)


@dataclass(frozen=True)
class ATConfig(ConfigMixin):
    lr: float = 1e-5
    epochs: int = 10
    attack: AttackConfig = field(default_factory=AttackConfig)
    eval_every: int = 1
    batch_size: int = 16
    seed: int = 0
    progress: bool = False

    def __post_init__(self):
        if not self.lr > 0:
            raise ConfigurationError(f'Learning rate must be positive, got {self.lr}')
        if self.epochs < 0:
            raise ConfigurationError(f'Epoch count must be non-negative, got {self.epochs}')
        if self.eval_every < 1:
            raise ConfigurationError(f'Evaluation cadence must be >= 1, got {self.eval_every}')


@dataclass
class TrajectoryRow():
    epoch: int
    map_clean: float
    map_pgd: float
    count_clean: int
    count_pgd: int
    drr: float
    qci: float
    mode: str

    def to_dict(self) -> dict:
        return asdict(self)


def copy_model(model: SpikingModel, model_id: Optional[str] = None) -> SpikingModel:
    clone = build_detector(model.config, model_id or model.model_id)
    clone.load_state_arrays(model.state_arrays())
    return clone


def _evaluate(model: SpikingModel, samples: Sequence[DetectionSample], at: ATConfig, epoch: int,
              thresholds: FailureModeThresholds) -> TrajectoryRow:
    row = evaluate_attack(model, samples, at.attack).cell.to_row(thresholds)
    return TrajectoryRow(
        epoch=epoch,
        map_clean=row['map_clean'],
        map_pgd=row['map_adv'],
        count_clean=row['count_clean'],
        count_pgd=row['count_adv'],
        drr=row['drr'],
        qci=row['qci'],
        mode=row['mode']
    )


def adversarial_train(model: SpikingModel, train_samples: Sequence[DetectionSample],
                      eval_samples: Sequence[DetectionSample], at: ATConfig,
                      thresholds: FailureModeThresholds = FailureModeThresholds()) -> List[TrajectoryRow]:
    """PGD adversarial training; the model is updated in place.

    Every epoch crafts PGD examples on the current weights and trains on them.
    The evaluation split is only read. A non-finite loss raises
    DivergenceError carrying the trajectory so far.
    """
    if not train_samples:
        raise ConfigurationError('Adversarial training needs training samples.')
    trajectory = [_evaluate(model, eval_samples, at, 0, thresholds)]
    hyper = TrainingHyper(epochs=at.epochs, lr=at.lr, batch_size=at.batch_size, seed=at.seed)
    optimizer = Adam(model.parameters(), lr=at.lr)
    rng = np.random.default_rng(at.seed)
    for epoch in tqdm(range(1, at.epochs + 1), desc=f'AT {model.model_id} lr={at.lr:g}', disable=not at.progress):
        order = rng.permutation(len(train_samples))
        for start in range(0, len(order), at.batch_size):
            batch = [train_samples[index] for index in order[start:start + at.batch_size]]
            perturbations = attack_images(model, batch, at.attack)
            adversarial = [
                DetectionSample(sample.image_id, perturbation.apply(sample.image), sample.gts)
                for sample, perturbation in zip(batch, perturbations)
            ]
            try:
                with model.trainable():
                    training_step(model, optimizer, adversarial, hyper)
            except NonFiniteError as error:
                raise DivergenceError(f'Adversarial training diverged in epoch {epoch}: {error}', trajectory) from error
        if epoch % at.eval_every == 0 or epoch == at.epochs:
            trajectory.append(_evaluate(model, eval_samples, at, epoch, thresholds))
            logger.info('AT epoch %d: %s', epoch, trajectory[-1])
    return trajectory


def adversarial_train_grid(model: SpikingModel, train_samples: Sequence[DetectionSample],
                           eval_samples: Sequence[DetectionSample], at: ATConfig,
                           learning_rates: Sequence[float] = purification_mapping.at_learning_rates,
                           thresholds: FailureModeThresholds = FailureModeThresholds()) -> Dict[float, Tuple[List[TrajectoryRow], Optional[str]]]:
    """One AT run per learning rate, each from a copy of ``model``; divergences are recorded, not raised."""
    results = {}
    for lr in learning_rates:
        clone = copy_model(model, f'{model.model_id}-at-{lr:g}')
        config = ATConfig(lr=lr, epochs=at.epochs, attack=at.attack, eval_every=at.eval_every,
                          batch_size=at.batch_size, seed=at.seed, progress=at.progress)
        try:
            results[lr] = (adversarial_train(clone, train_samples, eval_samples, config, thresholds), None)
        except DivergenceError as error:
            logger.error('AT at lr=%g diverged: %s', lr, error)
            results[lr] = (error.history, str(error))
    return results


def write_trajectory(trajectory: Sequence[TrajectoryRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=TRAJECTORY_COLUMNS)
        writer.writeheader()
        for row in trajectory:
            writer.writerow(row.to_dict())
    return path
