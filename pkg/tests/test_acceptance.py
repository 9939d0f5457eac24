#!/usr/bin/env python
# -*- coding: utf-8 -*-

import json
import math
import os
import tempfile
import unittest
import numpy as np
from pathlib import Path
from quality_corruption.attacks import AttackConfig, apgd, evaluate_attack, fmp, pgd, strength_trend
from quality_corruption.detector import TrainingHyper, build_detector, evaluate_map, train
from quality_corruption.harness import (
    CategoryIndex, ShapesDatasetConfig, SweepConfig, audit, detector_config_from_dict, generate_shapes,
    load_dataset, load_yaml, run_sweep, split_dataset, write_protocol_dump
)
from quality_corruption.metrics.metrics_mapping import failure_mode_labels
from .test_data import get_tiny_detector_config

_CONFIGS = Path(__file__).resolve().parents[1] / 'configs'


@unittest.skipUnless(os.environ.get('QC_RUN_SLOW'), 'end-to-end run, set QC_RUN_SLOW=1')
class TestEndToEnd(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls._directory = tempfile.TemporaryDirectory()
        cls.directory = Path(cls._directory.name)
        cfg = ShapesDatasetConfig(n_images=80, image_size=32, min_extent=8, max_extent=16, seed=0)
        cls.annotations = generate_shapes(cfg, cls.directory / 'shapes')
        cls.train_samples, cls.eval_samples = split_dataset(load_dataset(cls.directory / 'shapes'), 0.75)
        hyper = TrainingHyper(epochs=3, lr=1e-2, batch_size=16)
        cls.models = {}
        for model_id, ann_twin in (('snn-lif', False), ('ann-twin', True)):
            config = get_tiny_detector_config(ann_twin=ann_twin, input_size=32, channels=(8, 8, 8))
            model, _ = train(build_detector(config, model_id), cls.train_samples, hyper)
            cls.models[model_id] = model

    @classmethod
    def tearDownClass(cls):
        cls._directory.cleanup()

    def _sweep(self):
        return SweepConfig.from_dict({
            'models': [
                {'id': model_id, 'config': model.config.to_plain()} for model_id, model in self.models.items()
            ],
            'attacks': [
                {'norm': 'linf', 'eps': 4, 'steps': 3},
                {'norm': 'linf', 'eps': 8, 'steps': 3},
                {'norm': 'l2', 'eps': 0.5, 'steps': 3}
            ],
            'dataset': str(self.directory / 'shapes'),
            'output': str(self.directory / 'reports')
        })

    def test_sweep_rows_are_consistent(self):
        result = run_sweep(self._sweep(), self.eval_samples, self.models)
        self.assertEqual(result.errors, [])
        self.assertEqual(len(result.rows), 2 + 2 * 3)
        for row in result.rows:
            if row['mode'] == 'Undefined':
                self.assertTrue(math.isnan(row['qci']))
                continue
            self.assertIn(row['mode'], failure_mode_labels)
            self.assertAlmostEqual(row['qci'], row['map_drop_pct'] - row['drr'], places=9)
        self.assertTrue(all(path.exists() for path in result.paths))

    def test_audit_of_dumped_detections_reproduces_cell(self):
        model = self.models['ann-twin']
        outcome = evaluate_attack(model, self.eval_samples, AttackConfig(eps=8, steps=3))
        categories = CategoryIndex([1, 2, 3])
        clean_path, _ = write_protocol_dump(outcome.clean, categories, self.directory / 'dumps' / 'clean.json')
        adv_path, _ = write_protocol_dump(outcome.adversarial, categories, self.directory / 'dumps' / 'adv.json')
        with open(self.annotations, 'rt', encoding='utf-8') as f:
            document = json.load(f)
        kept = {sample.image_id for sample in self.eval_samples}
        document['images'] = [image for image in document['images'] if image['id'] in kept]
        document['annotations'] = [record for record in document['annotations'] if record['image_id'] in kept]
        report = audit(document, clean_path, adv_path, model_id=model.model_id)
        self.assertEqual(report.cell.count_clean, outcome.cell.count_clean)
        self.assertEqual(report.cell.count_adv, outcome.cell.count_adv)
        self.assertAlmostEqual(report.cell.map_clean, outcome.cell.map_clean, places=12)
        self.assertAlmostEqual(report.cell.map_adv, outcome.cell.map_adv, places=12)


@unittest.skipUnless(os.environ.get('QC_RUN_SLOW'), 'toy pipeline gates, set QC_RUN_SLOW=1')
class TestToyPipelineGates(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls._directory = tempfile.TemporaryDirectory()
        cls.directory = Path(cls._directory.name)
        generate_shapes(ShapesDatasetConfig(n_images=600, image_size=64, seed=0), cls.directory / 'shapes')
        cls.train_samples, cls.eval_samples = split_dataset(load_dataset(cls.directory / 'shapes'), 0.8)
        hyper = TrainingHyper(epochs=30, lr=1e-3, batch_size=16)
        cls.models = {}
        for model_id, filename in (('ann-twin', 'ann_twin.yaml'), ('snn-lif-t4', 'lif_t4.yaml')):
            config = detector_config_from_dict(load_yaml(_CONFIGS / filename))
            model, _ = train(build_detector(config, model_id), cls.train_samples, hyper)
            cls.models[model_id] = model
        cls.batch = cls.eval_samples[:100]

    @classmethod
    def tearDownClass(cls):
        cls._directory.cleanup()

    ################################################################################
    #                              UTILITY FUNCTIONS.                              #
    ################################################################################

    @staticmethod
    def _saturated(perturbation, image):
        delta = perturbation.delta
        adversarial = image.astype(np.float64) + delta
        at_budget = np.isclose(np.abs(delta), perturbation.config.radius, rtol=0.0, atol=1e-9)
        at_box = np.isclose(adversarial, 0.0, atol=1e-9) | np.isclose(adversarial, 1.0, atol=1e-9)
        return at_budget | at_box

    ################################################################################
    #                                PIPELINE GATES                                #
    ################################################################################

    def test_clean_map_gates(self):
        self.assertGreaterEqual(evaluate_map(self.models['ann-twin'], self.eval_samples), 0.6)
        self.assertGreaterEqual(evaluate_map(self.models['snn-lif-t4'], self.eval_samples), 0.4)

    def test_budget_ladder_decreases_strictly(self):
        sweep = SweepConfig.from_dict({
            'models': [
                {'id': model_id, 'config': model.config.to_plain()} for model_id, model in self.models.items()
            ],
            'attacks': [{'norm': 'linf', 'eps': eps, 'steps': 10} for eps in (2, 4, 8)],
            'dataset': str(self.directory / 'shapes'),
            'output': str(self.directory / 'ladder')
        })
        result = run_sweep(sweep, self.eval_samples, self.models)
        self.assertEqual(result.errors, [])
        self.assertEqual(len(result.rows), 2 + 2 * 3)
        for row in result.rows:
            self.assertNotEqual(row['mode'], 'Undefined', msg=row)
            self.assertTrue(math.isfinite(row['qci']))
        self.assertEqual(len(result.ladders), 2)
        for ladder in result.ladders.values():
            self.assertEqual(ladder['eps'], [2, 4, 8])
            self.assertTrue(ladder['strictly_decreasing'], msg=ladder)

    def test_detection_rate_reduction_grows_with_steps(self):
        cfg = AttackConfig(eps=8)
        trend, outcomes = strength_trend(self.models['snn-lif-t4'], self.eval_samples, cfg, (10, 20, 50, 100))
        self.assertEqual(trend.steps, [10, 20, 50, 100])
        self.assertEqual(len(outcomes), 4)
        self.assertGreater(trend.rho, 0.0, msg=trend.to_dict())
        twin_trend, _ = strength_trend(self.models['ann-twin'], self.eval_samples, cfg, (10, 20, 50, 100))
        self.assertEqual(twin_trend.model_id, 'ann-twin')
        self.assertEqual(len(twin_trend.drr), 4)

    ################################################################################
    #                        ATTACK PROPERTIES ON TRAINED MODELS                   #
    ################################################################################

    def test_linf_steps_saturate_the_budget(self):
        cfg = AttackConfig(eps=8, steps=10)
        model = self.models['ann-twin']
        saturated = [
            self._saturated(pgd(model, sample.image, cfg, sample.image_id), sample.image) for sample in self.batch
        ]
        self.assertGreater(float(np.mean(saturated)), 0.9)

    def test_pgd_lowers_the_loss(self):
        cfg = AttackConfig(eps=8, steps=10)
        model = self.models['snn-lif-t4']
        lowered = 0
        for sample in self.batch:
            history = pgd(model, sample.image, cfg, sample.image_id).loss_history
            lowered += int(history[-1] <= history[0])
        self.assertGreaterEqual(lowered, 95)

    def test_fmp_grows_membrane_disruption(self):
        cfg = AttackConfig(eps=8, steps=10, method='fmp')
        model = self.models['snn-lif-t4']
        grown = 0
        for sample in self.batch:
            history = fmp(model, sample.image, cfg, sample.image_id).membrane_history
            grown += int(history[-1] > history[0])
        self.assertGreaterEqual(grown, 90)

    def test_apgd_matches_or_beats_pgd(self):
        model = self.models['snn-lif-t4']
        plain_cfg = AttackConfig(eps=8, steps=10)
        apgd_cfg = AttackConfig(eps=8, steps=10, method='apgd')
        better = 0
        for sample in self.batch:
            plain = pgd(model, sample.image, plain_cfg, sample.image_id).loss_history[-1]
            adaptive = min(apgd(model, sample.image, apgd_cfg, sample.image_id).loss_history)
            better += int(adaptive <= plain)
        self.assertGreaterEqual(better, 80)
