# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
from .attacks import AttackConfig, evaluate_attack, random_noise_control, transfer
from .defenses import (
    ATConfig, FrameworkEvidence, adversarial_train, copy_model, certification_comparison, framework_table,
    purification_grid, write_trajectory
)
from .detector import (
    DetectorConfig, EpochMetrics, TrainingHyper, build_detector, load_checkpoint, save_checkpoint, train
)
from .exceptions import ConfigurationError
from .harness import (
    AuditReport, ShapesDatasetConfig, SweepConfig, SweepResult, audit, detector_config_from_dict,
    emit_report, generate_shapes, load_annotations, load_dataset, load_sweep_config, load_yaml,
    read_report, run_sweep, split_dataset, write_protocol_dump
)
from .harness import harness_mapping
from .metrics import BaselineCountStats, FailureModeThresholds, count_monitor

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _detector_config(detector: Union[None, PathLike, dict, DetectorConfig]) -> DetectorConfig:
    if isinstance(detector, DetectorConfig):
        return detector
    if detector is None or isinstance(detector, dict):
        return detector_config_from_dict(detector)
    return detector_config_from_dict(load_yaml(detector))


def generate_dataset(output: PathLike, n_images: int = 600, image_size: int = 64, seed: int = 0,
                     progress: bool = False) -> Path:
    return generate_shapes(ShapesDatasetConfig(n_images=n_images, image_size=image_size, seed=seed), output, progress)


def train_detector(dataset: PathLike, output: PathLike,
                   detector: Union[None, PathLike, dict, DetectorConfig] = None,
                   hyper: Optional[TrainingHyper] = None, model_id: Optional[str] = None,
                   subset: Optional[int] = None, validation_fraction: float = 0.0,
                   by_id: bool = True) -> Tuple[Path, List[EpochMetrics]]:
    """Train a toy detector on a shapes directory and save it as a checkpoint."""
    samples = load_dataset(dataset, subset, by_id=by_id)
    validation = None
    if validation_fraction:
        samples, validation = split_dataset(samples, 1.0 - validation_fraction)
    cfg = _detector_config(detector)
    hyper = hyper or TrainingHyper(seed=cfg.seed)
    model, history = train(build_detector(cfg, model_id), samples, hyper, validation)
    return save_checkpoint(model, output, hyper.seed), history


def attack_checkpoint(checkpoint: PathLike, dataset: PathLike, attack: AttackConfig, output: PathLike,
                      subset: Optional[int] = None, by_id: bool = True, workers: int = 1,
                      source: Optional[PathLike] = None, random_control: bool = False,
                      save_perturbations: bool = False,
                      thresholds: FailureModeThresholds = FailureModeThresholds()) -> dict:
    """One attack cell on a checkpoint; writes the report row and COCO result dumps.

    ``source`` turns the run into a transfer attack crafted on that checkpoint;
    ``random_control`` replaces the attack by random noise of the same budget.
    """
    if source is not None and random_control:
        raise ConfigurationError('A run is either a transfer attack or a random-noise control, not both.')
    output = Path(output)
    model = load_checkpoint(checkpoint)
    samples = load_dataset(dataset, subset, by_id=by_id)
    if random_control:
        outcome = random_noise_control(model, samples, attack)
    elif source is not None:
        outcome = transfer(load_checkpoint(source), model, samples, attack, workers)
    else:
        outcome = evaluate_attack(model, samples, attack, workers)
    row = outcome.cell.to_row(thresholds)
    metadata = {'checkpoint': str(checkpoint), 'attack': attack.to_plain(), 'attack_hash': attack.config_hash()}
    emit_report([row], output / 'report.json', metadata=metadata)
    emit_report([row], output / 'report.csv', metadata=metadata)
    categories = load_annotations(Path(dataset) / harness_mapping.annotations_file).categories
    write_protocol_dump(outcome.clean, categories, output / 'clean_results.json')
    write_protocol_dump(outcome.adversarial, categories, output / 'adversarial_results.json')
    if save_perturbations:
        for perturbation in outcome.perturbations:
            perturbation.save(output / 'perturbations' / f'{perturbation.image_id:06d}.pert')
    return row


def audit_dumps(annotations: PathLike, clean_dump: PathLike, adv_dump: PathLike,
                output: Optional[PathLike] = None, model_id: str = 'external',
                thresholds: FailureModeThresholds = FailureModeThresholds(), strict: bool = True) -> AuditReport:
    report = audit(annotations, clean_dump, adv_dump, model_id, thresholds, strict=strict)
    if output is not None:
        output = Path(output)
        output.mkdir(parents=True, exist_ok=True)
        with open(output / 'audit.json', 'wt', encoding='utf-8') as f:
            json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        emit_report([report.cell.to_row(thresholds)], output / 'audit.csv', metadata=report.thresholds)
    return report


def sweep(config: Union[PathLike, SweepConfig], samples=None, models=None, progress: bool = False,
          **overrides) -> SweepResult:
    if not isinstance(config, SweepConfig):
        config = load_sweep_config(config)
    return run_sweep(config.with_overrides(**overrides), samples, models, progress=progress)


def defend(checkpoint: PathLike, dataset: PathLike, attack: AttackConfig, output: PathLike,
           methods: Optional[Sequence[str]] = None, subset: Optional[int] = None,
           at: Optional[ATConfig] = None, train_dataset: Optional[PathLike] = None,
           certification: bool = False, by_id: bool = True,
           thresholds: FailureModeThresholds = FailureModeThresholds()) -> Dict[str, object]:
    """Defense battery on one checkpoint: purification grid, optional AT and certification check."""
    output = Path(output)
    model = load_checkpoint(checkpoint)
    samples = load_dataset(dataset, subset, by_id=by_id)
    attack_outcome = evaluate_attack(model, samples, attack)
    evaluations = purification_grid(model, attack, samples, methods, outcome=attack_outcome)
    emit_report([evaluation.to_row() for evaluation in evaluations], output / 'purification.csv',
                metadata={'attack': attack.to_plain(), 'checkpoint': str(checkpoint)})
    evidence = FrameworkEvidence(attack_outcome.cell, purification=evaluations, thresholds=thresholds)
    clean_counts = list(attack_outcome.clean.counts().values())
    try:
        baseline = BaselineCountStats.from_counts(clean_counts)
        evidence.monitor_verdicts = count_monitor(baseline, list(attack_outcome.adversarial.counts().values()))
    except ConfigurationError as error:
        logger.warning('Count monitor skipped: %s', error)
    results: Dict[str, object] = {'purification': evaluations}
    if at is not None:
        if train_dataset is None:
            raise ConfigurationError('Adversarial training needs a training dataset.')
        clone = copy_model(model, f'{model.model_id}-at')
        trajectory = adversarial_train(clone, load_dataset(train_dataset), samples, at, thresholds)
        write_trajectory(trajectory, output / 'at_trajectory.csv')
        evidence.trajectory = trajectory
        results['trajectory'] = trajectory
    if certification:
        comparison = certification_comparison(model, samples, attack.eps, attack.norm, seed=attack.seed)
        emit_report(comparison.to_rows(), output / 'certification.csv')
        evidence.certification = comparison
        results['certification'] = comparison
    table = framework_table(evidence)
    with open(output / 'framework.json', 'wt', encoding='utf-8') as f:
        json.dump(table, f, indent=2)
    results['framework'] = table
    return results


def convert_report(source: PathLike, output: PathLike, fmt: Optional[str] = None) -> Path:
    metadata, rows = read_report(source)
    return emit_report(rows, output, fmt, metadata)
