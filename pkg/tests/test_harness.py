#!/usr/bin/env python
# -*- coding: utf-8 -*-

import json
import math
import tempfile
import unittest
import numpy as np
from pathlib import Path
from quality_corruption.cli import _attack_from_args, build_parser, main
from quality_corruption.detector import build_detector
from quality_corruption.exceptions import ConfigurationError, SchemaError, UnknownMethodError
from quality_corruption.harness import (
    CategoryIndex, ShapesDatasetConfig, SweepConfig, audit, emit_report, generate_shapes, load_annotations,
    load_coco, load_dataset, read_report, render_table, run_sweep, select_subset
)
from .test_data import (
    get_annotations, get_clean_dump, get_dump_with_bad_record, get_dump_with_negative_extent,
    get_dump_with_unknown_image, get_quality_corruption_dump, get_report_rows, get_suppression_dump,
    get_sweep_config_dict, get_tiny_samples
)


class TestHarness(unittest.TestCase):
    def setUp(self):
        self._directory = tempfile.TemporaryDirectory()
        self.directory = Path(self._directory.name)

    def tearDown(self):
        self._directory.cleanup()

    ################################################################################
    #                              UTILITY FUNCTIONS.                              #
    ################################################################################

    def _write_json(self, name, content):
        path = self.directory / name
        with open(path, 'wt', encoding='utf-8') as f:
            json.dump(content, f)
        return path

    def _check_rows(self, rows, expected):
        self.assertEqual(len(rows), len(expected))
        for row, reference in zip(rows, expected):
            for column, value in reference.items():
                if isinstance(value, float) and math.isnan(value):
                    self.assertTrue(math.isnan(row[column]))
                else:
                    self.assertEqual(row[column], value)

    def _sweep_config(self, **values):
        document = get_sweep_config_dict()
        document['output'] = str(self.directory / 'sweep')
        document.update(values)
        return SweepConfig.from_dict(document)

    @staticmethod
    def _models(sweep):
        return {entry.model_id: build_detector(entry.config, entry.model_id) for entry in sweep.models}

    ################################################################################
    #                               COCO PARSING                                   #
    ################################################################################

    def test_category_index(self):
        categories = CategoryIndex([7, 3, 5, 3])
        self.assertEqual(len(categories), 3)
        self.assertEqual([categories.to_class(value) for value in (3, 5, 7)], [0, 1, 2])
        self.assertEqual(categories.to_category(2), 7)
        with self.assertRaises(SchemaError):
            categories.to_class(4)

    def test_load_annotations(self):
        annotations = load_annotations(get_annotations(6))
        self.assertEqual(annotations.image_ids, list(range(1, 7)))
        self.assertEqual([gt.class_id for gt in annotations.gts], [1, 2, 0, 1, 2, 0])
        self.assertEqual(annotations.gts[0].box.as_xywh(), [8.0, 8.0, 20.0, 20.0])

    def test_annotation_with_unknown_image(self):
        document = get_annotations(3)
        document['annotations'][2]['image_id'] = 99
        with self.assertRaises(SchemaError) as context:
            load_annotations(document)
        self.assertEqual(context.exception.record_index, 2)

    def test_strict_dump_reports_record_index(self):
        with self.assertRaises(SchemaError) as context:
            load_coco(get_annotations(), get_dump_with_bad_record(index=3), get_clean_dump())
        self.assertEqual(context.exception.record_index, 3)
        self.assertIn('score', str(context.exception))
        with self.assertRaises(SchemaError) as context:
            load_coco(get_annotations(), get_clean_dump(), get_dump_with_negative_extent(index=1))
        self.assertEqual(context.exception.record_index, 1)

    def test_lenient_dump_collects_errors(self):
        inputs = load_coco(get_annotations(), get_dump_with_bad_record(index=3), get_clean_dump(), strict=False)
        self.assertEqual(len(inputs.errors), 1)
        self.assertTrue(inputs.errors[0].startswith('clean: Record 3'))
        self.assertEqual(len(inputs.clean.all_ranked()), 2 * 40 - 1)

    def test_unknown_image_is_a_warning(self):
        inputs = load_coco(get_annotations(), get_dump_with_unknown_image(), get_clean_dump())
        self.assertEqual(len(inputs.warnings), 1)
        self.assertIn('140', inputs.warnings[0])
        self.assertEqual(inputs.errors, [])

    def test_dumps_are_audited_as_given(self):
        inputs = load_coco(get_annotations(), get_clean_dump(), get_clean_dump())
        self.assertEqual(inputs.clean.total_count, 40)
        self.assertEqual(len(inputs.clean.all_ranked()), 80)
        self.assertTrue(all(det.confidence >= 0.25 for det in inputs.clean.all_emitted()))

    ################################################################################
    #                                   AUDIT                                      #
    ################################################################################

    def test_audit_quality_corruption(self):
        report = audit(get_annotations(), get_clean_dump(), get_quality_corruption_dump(), model_id='dump')
        row = report.cell.to_row()
        self.assertEqual(row['map_clean'], 1.0)
        self.assertEqual(row['map_adv'], 0.0)
        self.assertEqual(row['drr'], 0.0)
        self.assertEqual(row['qci'], 100.0)
        self.assertEqual(row['mode'], 'QualityCorruption')
        self.assertEqual(report.monitor_alarms, 0)
        self.assertGreater(len(report.monitor_verdicts), 0)
        self.assertTrue(all(value.value == 100.0 for value in report.per_image))
        self.assertEqual(report.qci_summary.corruption_fraction, 1.0)
        self.assertEqual(report.signals_clean.count, report.signals_adv.count)

    def test_audit_suppression(self):
        report = audit(get_annotations(), get_clean_dump(), get_suppression_dump())
        row = report.cell.to_row()
        self.assertEqual(row['drr'], 90.0)
        self.assertEqual(row['mode'], 'Suppression')
        self.assertGreater(report.monitor_alarms, 0)
        self.assertTrue(report.monitor_verdicts[0].alarm)

    def test_audit_skips_monitor_on_small_baseline(self):
        report = audit(get_annotations(10), get_clean_dump(10), get_quality_corruption_dump(10))
        self.assertEqual(report.monitor_verdicts, [])
        self.assertTrue(any(warning.startswith('Count monitor skipped') for warning in report.warnings))
        document = report.to_dict()
        self.assertEqual(document['row']['mode'], 'QualityCorruption')
        self.assertEqual(document['thresholds']['nms_iou'], 0.65)

    ################################################################################
    #                                  REPORTS                                     #
    ################################################################################

    def test_csv_report(self):
        rows = get_report_rows()
        metadata = {'seed': 0, 'config_hash': 'abc'}
        path = emit_report(rows, self.directory / 'report.csv', metadata=metadata)
        with open(path, 'rt', encoding='utf-8') as f:
            self.assertTrue(f.readline().startswith('# metadata: '))
        read_metadata, read_rows = read_report(path)
        self.assertEqual(read_metadata, metadata)
        self._check_rows(read_rows, rows)

    def test_json_report_with_undefined_values(self):
        rows = get_report_rows()
        rows[0].update({'drr': math.nan, 'map_drop_pct': math.nan, 'qci': math.nan, 'mode': 'Undefined'})
        path = emit_report(rows, self.directory / 'report.json')
        with open(path, 'rt', encoding='utf-8') as f:
            document = json.load(f)
        self.assertIsNone(document['rows'][0]['drr'])
        self.assertEqual(document['columns'][0], 'model')
        _, read_rows = read_report(path)
        self._check_rows(read_rows, rows)

    def test_report_errors(self):
        with self.assertRaises(ConfigurationError):
            emit_report([], self.directory / 'empty.csv')
        with self.assertRaises(ConfigurationError):
            emit_report(get_report_rows(), self.directory / 'report.xml')
        bare = self.directory / 'bare.csv'
        bare.write_text('model,norm\nEMS-YOLO,linf\n', encoding='utf-8')
        with self.assertRaises(SchemaError):
            read_report(bare)

    def test_render_table(self):
        rows = get_report_rows()
        rows[0]['qci'] = math.nan
        lines = render_table(rows).splitlines()
        self.assertEqual(len(lines), 12)
        self.assertTrue(lines[0].startswith('Model'))
        self.assertTrue(lines[2].startswith('Adv-SpikingYOLOX'))
        self.assertIn('n/a', ''.join(lines))
        self.assertIn('+63.0', ''.join(lines))

    ################################################################################
    #                               SHAPES DATASET                                 #
    ################################################################################

    def test_shapes_are_deterministic(self):
        cfg = ShapesDatasetConfig(n_images=3, image_size=32, min_extent=6, max_extent=12, seed=5)
        first = generate_shapes(cfg, self.directory / 'first')
        second = generate_shapes(cfg, self.directory / 'second')
        self.assertEqual(first.read_bytes(), second.read_bytes())
        for name in ('000001.png', '000003.png'):
            self.assertEqual(
                (self.directory / 'first' / 'images' / name).read_bytes(),
                (self.directory / 'second' / 'images' / name).read_bytes()
            )

    def test_load_shapes(self):
        cfg = ShapesDatasetConfig(n_images=4, image_size=32, min_extent=6, max_extent=12, seed=1)
        generate_shapes(cfg, self.directory / 'shapes')
        samples = load_dataset(self.directory / 'shapes')
        self.assertEqual([sample.image_id for sample in samples], [1, 2, 3, 4])
        self.assertEqual(len(load_dataset(self.directory / 'shapes', subset=2)), 2)
        for sample in samples:
            self.assertEqual(sample.image.shape, (3, 32, 32))
            self.assertGreaterEqual(sample.image.min(), 0.0)
            self.assertLessEqual(sample.image.max(), 1.0)
            self.assertGreaterEqual(len(sample.gts), 1)
            for gt in sample.gts:
                self.assertLessEqual(gt.box.x + gt.box.w, 32)
                self.assertLessEqual(gt.box.y + gt.box.h, 32)

    def test_invalid_shapes_config(self):
        with self.assertRaises(ConfigurationError):
            ShapesDatasetConfig(image_size=16, max_extent=24)
        with self.assertRaises(ConfigurationError):
            ShapesDatasetConfig(min_shapes=0)

    ################################################################################
    #                                   SWEEP                                      #
    ################################################################################

    def test_sweep_configuration_errors(self):
        document = get_sweep_config_dict()
        del document['attacks']
        with self.assertRaises(ConfigurationError):
            SweepConfig.from_dict(document)
        with self.assertRaises(ConfigurationError):
            self._sweep_config(models=[{'id': 'twice'}, {'id': 'twice'}])
        with self.assertRaises(UnknownMethodError):
            self._sweep_config(defenses=['wiener'])

    def test_sweep_needs_a_model_source(self):
        sweep = self._sweep_config()
        with self.assertRaises(ConfigurationError):
            run_sweep(sweep, get_tiny_samples(), write=False)

    def test_sweep_cardinality(self):
        sweep = self._sweep_config()
        result = run_sweep(sweep, get_tiny_samples(), self._models(sweep))
        self.assertEqual(result.errors, [])
        self.assertEqual(len(result.rows), 2 + 2 * 3)
        attacked = [row for row in result.rows if 'attack_hash' in row]
        self.assertEqual(len(attacked), 6)
        self.assertEqual({row['attack_hash'] for row in attacked}, set(result.metadata['attack_hashes']))
        self.assertEqual(len(result.per_image), 6)
        self.assertEqual(sorted(path.name for path in result.paths),
                         ['per_image_qci.json', 'report.csv', 'report.json', 'report.txt', 'trends.json'])
        self.assertEqual(sorted(result.ladders), ['ann-twin|det_sum|linf|1', 'snn-lif|det_sum|linf|1'])
        self.assertTrue(all(ladder['eps'] == [2, 4, 8] for ladder in result.ladders.values()))
        self.assertEqual(result.trends, {})
        metadata, rows = read_report(self.directory / 'sweep' / 'report.csv')
        self.assertEqual(len(rows), 8)
        self.assertEqual(metadata['config_hash'], sweep.config_hash())

    def test_sweep_with_defenses_and_subset(self):
        sweep = self._sweep_config(defenses=['bit_depth_4'], subset=2)
        result = run_sweep(sweep, get_tiny_samples(), self._models(sweep), write=False)
        defended = [row for row in result.rows if row.get('defense') == 'bit_depth_4']
        self.assertEqual(len(defended), 6)
        self.assertEqual(len(result.rows), 2 + 2 * 3 * 2)
        self.assertEqual(result.paths, [])
        self.assertEqual(result.metadata['subset'], 2)

    def test_sweep_step_trends(self):
        sweep = self._sweep_config(trend_steps=[2, 1])
        self.assertEqual(sweep.trend_steps, (2, 1))
        result = run_sweep(sweep, get_tiny_samples(), self._models(sweep))
        self.assertEqual(result.errors, [])
        self.assertEqual(sorted(result.trends), ['ann-twin', 'snn-lif'])
        for trend in result.trends.values():
            self.assertEqual(trend['steps'], [1, 2])
            self.assertEqual((trend['attack'], trend['norm'], trend['eps']), ('det_sum', 'linf', 2))
            self.assertIn('rho', trend)
        with open(self.directory / 'sweep' / 'trends.json', 'rt', encoding='utf-8') as f:
            document = json.load(f)
        self.assertEqual(sorted(document['trends']), ['ann-twin', 'snn-lif'])
        self.assertEqual(len(document['ladders']), 2)
        with self.assertRaises(ConfigurationError):
            self._sweep_config(trend_steps=[0])

    def test_subset_order(self):
        samples = list(reversed(get_tiny_samples()))
        self.assertEqual([sample.image_id for sample in select_subset(samples, 2)], [1, 2])
        self.assertEqual([sample.image_id for sample in select_subset(samples, 2, by_id=False)], [4, 3])
        self.assertEqual([sample.image_id for sample in select_subset(samples)], [4, 3, 2, 1])
        sweep = self._sweep_config(subset=2)
        self.assertTrue(sweep.subset_by_id)
        self.assertFalse(sweep.with_overrides(subset_by_id=False).subset_by_id)
        self.assertTrue(sweep.with_overrides(subset_by_id=None).subset_by_id)
        result = run_sweep(sweep.with_overrides(subset_by_id=False), samples, self._models(sweep), write=False)
        self.assertFalse(result.metadata['subset_by_id'])

    def test_sweep_metadata_is_deterministic(self):
        sweep = self._sweep_config()
        first = run_sweep(sweep, get_tiny_samples(), self._models(sweep), write=False)
        second = run_sweep(sweep, get_tiny_samples(), self._models(sweep), write=False)
        self.assertEqual(first.metadata, second.metadata)
        np.testing.assert_array_equal(
            [row['count_adv'] for row in first.rows], [row['count_adv'] for row in second.rows]
        )

    ################################################################################
    #                               COMMAND LINE                                   #
    ################################################################################

    def test_parser(self):
        args = build_parser().parse_args(['attack', 'model.ckpt', 'data', 'out', '--norm', 'l2', '--eps', '20'])
        self.assertEqual((args.norm, args.eps, args.by_id), ('l2', 20.0, None))
        args = build_parser().parse_args(['audit', 'a.json', 'c.json', 'd.json', '--lenient'])
        self.assertTrue(args.lenient)

    def test_fmp_method_flag(self):
        command = ['attack', 'model.ckpt', 'data', 'out', '--method', 'fmp']
        self.assertEqual(_attack_from_args(build_parser().parse_args(command)).fmp_lambda, 0.5)
        explicit = _attack_from_args(build_parser().parse_args(command + ['--fmp-lambda', '0.2']))
        self.assertEqual(explicit.label, 'fmp0.2/det_sum')

    def test_subset_order_flags(self):
        for command in (['train', 'data', 'out.ckpt'], ['sweep', 'sweep.yaml'],
                        ['defend', 'model.ckpt', 'data', 'out']):
            self.assertIsNone(build_parser().parse_args(command + ['--subset', '5']).by_id)
            self.assertTrue(build_parser().parse_args(command + ['--by-id']).by_id)
            self.assertFalse(build_parser().parse_args(command + ['--by-position']).by_id)
        with self.assertRaises(SystemExit):
            build_parser().parse_args(['sweep', 'sweep.yaml', '--by-id', '--by-position'])

    def test_cli_report_conversion(self):
        source = emit_report(get_report_rows(), self.directory / 'report.csv', metadata={'seed': 0})
        target = self.directory / 'converted.json'
        self.assertEqual(main(['report', str(source), str(target)]), 0)
        metadata, rows = read_report(target)
        self.assertEqual(metadata, {'seed': 0})
        self.assertEqual(len(rows), 10)
        self.assertEqual(main(['report', str(self.directory / 'missing.csv'), str(target)]), 2)

    def test_cli_audit(self):
        annotations = self._write_json('annotations.json', get_annotations())
        clean = self._write_json('clean.json', get_clean_dump())
        adversarial = self._write_json('adversarial.json', get_quality_corruption_dump())
        bad = self._write_json('bad.json', get_dump_with_bad_record())
        output = self.directory / 'audit'
        self.assertEqual(main(['audit', str(annotations), str(clean), str(adversarial), '--output', str(output)]), 0)
        _, rows = read_report(output / 'audit.csv')
        self.assertEqual(rows[0]['mode'], 'QualityCorruption')
        self.assertEqual(main(['audit', str(annotations), str(bad), str(adversarial)]), 1)
        self.assertEqual(main(['audit', str(annotations), str(bad), str(adversarial), '--lenient']), 0)
