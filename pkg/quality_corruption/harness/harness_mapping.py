#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# class_id -> COCO category
shape_categories = {
    0: {'id': 1, 'name': 'circle', 'drawer': '_draw_circle'},
    1: {'id': 2, 'name': 'square', 'drawer': '_draw_square'},
    2: {'id': 3, 'name': 'triangle', 'drawer': '_draw_triangle'}
}

annotations_file = 'annotations.json'
images_directory = 'images'

# Required fields and their accepted types, per COCO record kind
annotation_fields = {
    'image_id': (int,),
    'category_id': (int,),
    'bbox': (list,)
}
image_fields = {
    'id': (int,),
    'file_name': (str,)
}
result_fields = {
    'image_id': (int,),
    'category_id': (int,),
    'bbox': (list,),
    'score': (int, float)
}

report_formats = {
    'csv': '_write_csv',
    'json': '_write_json',
    'txt': '_write_text'
}

# Report columns beyond the fixed metric schema
report_extra_columns = (
    'negative_drop', 'defense', 'verdict', 'drr_undefended', 'map_adv_undefended', 'map_clean_purified',
    'attack', 'worst', 'least_detectable', 'attack_hash'
)

report_column_types = {
    'model': str,
    'norm': str,
    'eps': float,
    'steps': int,
    'loss': str,
    'map_clean': float,
    'map_adv': float,
    'count_clean': int,
    'count_adv': int,
    'drr': float,
    'map_drop_pct': float,
    'qci': float,
    'mode': str,
    'negative_drop': bool,
    'defense': str,
    'verdict': str,
    'drr_undefended': float,
    'map_adv_undefended': float,
    'map_clean_purified': float,
    'attack': str,
    'worst': bool,
    'least_detectable': bool,
    'attack_hash': str
}
