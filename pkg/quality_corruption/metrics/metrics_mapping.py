#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Fixed column order of every report row
report_columns = (
    'model', 'norm', 'eps', 'steps', 'loss', 'map_clean', 'map_adv', 'count_clean',
    'count_adv', 'drr', 'map_drop_pct', 'qci', 'mode'
)

# Rendered text table, Model / Norm / eps / DRR / mAP drop / QCI
text_table_columns = (
    ('Model', 'model', '{}'),
    ('Norm', 'norm', '{}'),
    ('eps', 'eps', '{:g}'),
    ('DRR', 'drr', '{:.1f}'),
    ('mAP↓', 'map_drop_pct', '{:.1f}'),
    ('QCI', 'qci', '{:+.1f}'),
    ('Mode', 'mode', '{}')
)

failure_mode_labels = ('Suppression', 'Coupled', 'QualityCorruption')

per_image_exclusions = {
    'no_clean_detections': 'image has no clean detection',
    'zero_clean_precision': 'clean precision is zero'
}

QCI_HISTOGRAM_BINS = 20
