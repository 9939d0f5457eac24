# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import json
import logging
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from tqdm import tqdm
from typing import Dict, List, Optional, Sequence, Tuple
from .config import ModelEntry, SweepConfig
from .report import emit_report
from .shapes import load_dataset
from .. import __version__
from ..attacks import AttackConfig, AttackOutcome, evaluate_attack, strength_trend
from ..defenses import evaluate_defense
from ..detector import (
    ProtocolDetections, SpikingModel, build_detector, load_checkpoint, run_protocol, stack_samples, train
)
from ..evaluation import EVAL_CONFIDENCE, INFERENCE_CONFIDENCE, MATCH_IOU, NMS_IOU, DetectionSample
from ..exceptions import ConfigurationError
from ..metrics import CellResult, budget_ladder, build_cell, summarize_per_image_qci

logger = logging.getLogger(__name__)


def select_subset(samples: Sequence[DetectionSample], subset: Optional[int] = None,
                  by_id: bool = True) -> List[DetectionSample]:
    """First ``subset`` samples, by ascending image id or in the given order."""
    samples = list(samples)
    if subset is None:
        return samples
    if by_id:
        samples.sort(key=lambda sample: sample.image_id)
    return samples[:subset]


@dataclass
class SweepResult():
    rows: List[dict] = field(default_factory=list)
    per_image: Dict[str, dict] = field(default_factory=dict)
    ladders: Dict[str, dict] = field(default_factory=dict)
    trends: Dict[str, dict] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    paths: List[Path] = field(default_factory=list)


class SweepRunner():
    """Every model x attack cell against each model's own clean baseline.

    Cells run in a thread pool; a failing cell is recorded in ``errors`` and
    the sweep goes on. Report writing happens once, after all cells.
    """

    def __init__(self, sweep: SweepConfig, progress: bool = False):
        self._sweep = sweep
        self._progress = progress
        self._errors: List[str] = []
        self._warnings = set()
        self._attack_hashes = [cfg.config_hash() for cfg in sweep.attacks]

    @property
    def errors(self) -> List[str]:
        return self._errors

    @property
    def warnings(self) -> set:
        return self._warnings

    def run(self, samples: Optional[Sequence[DetectionSample]] = None,
            models: Optional[Dict[str, SpikingModel]] = None, write: bool = True) -> SweepResult:
        if samples is None:
            samples = load_dataset(self._sweep.dataset, self._sweep.subset, by_id=self._sweep.subset_by_id)
        else:
            samples = select_subset(samples, self._sweep.subset, self._sweep.subset_by_id)
        if not samples:
            raise ConfigurationError('The sweep dataset holds no images.')
        models = dict(models or {})
        for entry in self._sweep.models:
            if entry.model_id not in models:
                models[entry.model_id] = self._load_model(entry)
        result = SweepResult()
        cleans = {}
        for entry in self._sweep.models:
            clean_cell, clean = self._clean_baseline(models[entry.model_id], samples)
            cleans[entry.model_id] = clean
            result.rows.append(clean_cell)
        tasks = [
            (entry.model_id, index)
            for entry in self._sweep.models for index in range(len(self._sweep.attacks))
        ]

        def run_cell(task):
            model_id, index = task
            return self._run_cell(models[model_id], samples, index, cleans[model_id])

        with ThreadPoolExecutor(max_workers=self._sweep.workers) as pool:
            outcomes = list(tqdm(pool.map(run_cell, tasks), total=len(tasks), desc='sweep',
                                 disable=not self._progress))
        ladder_groups: Dict[str, List[CellResult]] = {}
        for (model_id, index), cell in zip(tasks, outcomes):
            if cell is None:
                continue
            rows, per_image, attack_cell = cell
            result.rows.extend(rows)
            cfg = self._sweep.attacks[index]
            result.per_image[f'{model_id}|{cfg.label}|{cfg.norm}|{cfg.eps:g}|{cfg.steps}'] = per_image
            ladder_groups.setdefault(f'{model_id}|{cfg.label}|{cfg.norm}|{cfg.steps}', []).append(attack_cell)
        for key, cells in ladder_groups.items():
            if len({cell.eps for cell in cells}) > 1:
                result.ladders[key] = budget_ladder(cells).to_dict()
        if self._sweep.trend_steps:
            for entry in self._sweep.models:
                trend = self._trend(models[entry.model_id], samples, cleans[entry.model_id])
                if trend is not None:
                    result.trends[entry.model_id] = trend
        self._check_attack_constancy(result.rows)
        result.errors = list(self._errors)
        result.warnings = sorted(self._warnings)
        result.metadata = self.metadata()
        if write:
            result.paths = self.write(result)
        return result

    def _load_model(self, entry: ModelEntry) -> SpikingModel:
        if entry.checkpoint and Path(entry.checkpoint).exists():
            model = load_checkpoint(entry.checkpoint)
            if model.config.config_hash() != entry.config.config_hash():
                self._warnings.add(f'Checkpoint of {entry.model_id} overrides its configured detector.')
            return model
        if self._sweep.training is None:
            raise ConfigurationError(
                f'Model {entry.model_id} has no checkpoint and the sweep requests no training.'
            )
        dataset = self._sweep.train_dataset or self._sweep.dataset
        model = build_detector(entry.config, entry.model_id)
        train(model, load_dataset(dataset), self._sweep.training)
        return model

    def _clean_baseline(self, model: SpikingModel, samples: Sequence[DetectionSample]) -> Tuple[dict, ProtocolDetections]:
        images, image_ids, gts = stack_samples(samples)
        clean = run_protocol(model, images, image_ids)
        row = build_cell(model.model_id, clean, clean, gts).to_row(self._sweep.thresholds)
        return row, clean

    def _run_cell(self, model: SpikingModel, samples: Sequence[DetectionSample], index: int,
                  clean: ProtocolDetections) -> Optional[Tuple[List[dict], dict, CellResult]]:
        cfg: AttackConfig = self._sweep.attacks[index]
        try:
            outcome = evaluate_attack(model, samples, cfg, clean=clean)
            rows = [self._row(outcome.cell.to_row(self._sweep.thresholds), index)]
            rows.extend(self._defended_rows(model, samples, cfg, outcome, index))
        except Exception as error:
            self._errors.append(f'Cell {model.model_id} x {cfg.label} {cfg.norm} eps={cfg.eps:g} failed: {error}')
            logger.error('Sweep cell failed: %s', error)
            return None
        summary = summarize_per_image_qci(outcome.per_image)
        per_image = {
            'values': [value.value for value in outcome.per_image if value.included],
            'summary': summary.to_dict()
        }
        return rows, per_image, outcome.cell

    def _trend(self, model: SpikingModel, samples: Sequence[DetectionSample],
               clean: ProtocolDetections) -> Optional[dict]:
        cfg = self._sweep.attacks[0]
        try:
            trend, _ = strength_trend(model, samples, cfg, self._sweep.trend_steps, self._sweep.workers, clean)
        except Exception as error:
            self._errors.append(f'Step trend of {model.model_id} failed: {error}')
            logger.error('Step trend failed: %s', error)
            return None
        content = trend.to_dict()
        content.update(attack=cfg.label, norm=cfg.norm, eps=cfg.eps)
        return content

    def _defended_rows(self, model: SpikingModel, samples: Sequence[DetectionSample], cfg: AttackConfig,
                       outcome: AttackOutcome, index: int) -> List[dict]:
        rows = []
        for name in self._sweep.defenses:
            evaluation = evaluate_defense(model, name, cfg, samples, self._sweep.verdict, outcome)
            row = evaluation.defended.to_row(self._sweep.thresholds)
            row.update({'defense': evaluation.defense, 'verdict': evaluation.verdict})
            rows.append(self._row(row, index))
        return rows

    def _row(self, row: dict, index: int) -> dict:
        row['attack_hash'] = self._attack_hashes[index]
        return row

    def _check_attack_constancy(self, rows: Sequence[dict]):
        for index, cfg in enumerate(self._sweep.attacks):
            if cfg.config_hash() != self._attack_hashes[index]:
                raise ConfigurationError(f'Attack configuration {index} changed during the sweep')
        recorded = {row['attack_hash'] for row in rows if 'attack_hash' in row}
        if not recorded <= set(self._attack_hashes):
            raise ConfigurationError('A sweep row was produced by an attack outside the configuration')

    def metadata(self) -> dict:
        return {
            'seed': self._sweep.seed,
            'config_hash': self._sweep.config_hash(),
            'attack_hashes': self._attack_hashes,
            'versions': {'quality_corruption': __version__, 'numpy': np.__version__},
            'thresholds': {
                'failure_mode': self._sweep.thresholds.to_plain(),
                'verdict': self._sweep.verdict.to_plain(),
                'inference_confidence': INFERENCE_CONFIDENCE,
                'eval_confidence': EVAL_CONFIDENCE,
                'nms_iou': NMS_IOU,
                'match_iou': MATCH_IOU
            },
            'subset': self._sweep.subset,
            'subset_by_id': self._sweep.subset_by_id,
            'errors': list(self._errors)
        }

    def write(self, result: SweepResult) -> List[Path]:
        output = Path(self._sweep.output)
        paths = [
            emit_report(result.rows, output / f'report.{fmt}', fmt, result.metadata)
            for fmt in ('csv', 'json', 'txt')
        ]
        histogram = output / 'per_image_qci.json'
        with open(histogram, 'wt', encoding='utf-8') as f:
            json.dump({'metadata': result.metadata, 'cells': result.per_image}, f, indent=2, sort_keys=True)
        paths.append(histogram)
        trends = output / 'trends.json'
        with open(trends, 'wt', encoding='utf-8') as f:
            json.dump({'metadata': result.metadata, 'ladders': result.ladders, 'trends': result.trends},
                      f, indent=2, sort_keys=True)
        paths.append(trends)
        return paths


def run_sweep(sweep: SweepConfig, samples: Optional[Sequence[DetectionSample]] = None,
              models: Optional[Dict[str, SpikingModel]] = None, write: bool = True,
              progress: bool = False) -> SweepResult:
    return SweepRunner(sweep, progress).run(samples, models, write)
