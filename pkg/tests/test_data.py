#!/usr/bin/env python
# -*- coding: utf-8 -*-

import numpy as np
from copy import deepcopy
from quality_corruption.detector import DetectorConfig
from quality_corruption.evaluation import Box, DetectionSample, GroundTruth
from quality_corruption.numeric import SurrogateSpec
from quality_corruption.substrate import SubstrateSpec

################################################################################
#                           DATA STRUCTURES EXAMPLES                           #
################################################################################

_BASE_ANNOTATIONS = {
    "info": {
        "description": "quality-corruption test annotations"
    },
    "images": [],
    "annotations": [],
    "categories": [
        {"id": 1, "name": "circle"},
        {"id": 2, "name": "square"},
        {"id": 3, "name": "triangle"}
    ]
}

_OBJECT_BBOX = [8.0, 8.0, 20.0, 20.0]
_DISPLACED_BBOX = [40.0, 40.0, 20.0, 20.0]
_BACKGROUND_BBOX = [44.0, 2.0, 10.0, 10.0]

# (model, norm, eps, mAP drop %, DRR %, QCI, failure mode)
_REFERENCE_CELLS = (
    ("EMS-YOLO", "linf", 2, 59.1, 75.4, -16.3, "Coupled"),
    ("EMS-YOLO", "linf", 4, 81.0, 72.2, 8.8, "Coupled"),
    ("EMS-YOLO", "linf", 8, 92.0, 29.0, 63.0, "QualityCorruption"),
    ("EMS-YOLO", "l2", 10, 87.1, 89.6, -2.5, "Suppression"),
    ("EMS-YOLO", "l2", 20, 93.0, 77.7, 15.4, "Coupled"),
    ("EMS-YOLO", "l2", 30, 96.4, 62.0, 34.4, "Coupled"),
    ("YOLOv3-tiny", "linf", 8, 95.9, 99.6, -3.7, "Suppression"),
    ("SpikeYOLO", "linf", 8, 91.1, 85.6, 5.5, "Suppression"),
    ("SpikingYOLOX", "linf", 4, 96.8, 99.2, -2.4, "Suppression"),
    ("Adv-SpikingYOLOX", "linf", 4, 95.2, 99.2, -4.0, "Suppression")
)

_TINY_DETECTOR = {
    "input_size": 16,
    "channels": [4, 4],
    "grid_size": 4,
    "num_classes": 3,
    "substrate": {
        "encoding": "binary01",
        "neuron": "LIF",
        "T": 2,
        "c1_binary_spikes": "yes",
        "c2_ac_only": True,
        "c3_no_dense_matmul": True
    },
    "seed": 0
}

_SWEEP_CONFIG = {
    "models": [
        {"id": "snn-lif"},
        {"id": "ann-twin", "config": {"ann_twin": True}}
    ],
    "attacks": [
        {"norm": "linf", "eps": 2, "steps": 1},
        {"norm": "linf", "eps": 4, "steps": 1},
        {"norm": "linf", "eps": 8, "steps": 1}
    ],
    "dataset": "shapes",
    "seed": 0
}


################################################################################
#                             ANNOTATIONS & DUMPS                              #
################################################################################

def _category(image_id):
    return 1 + image_id % 3


def get_annotations(n_images=40):
    document = deepcopy(_BASE_ANNOTATIONS)
    for image_id in range(1, n_images + 1):
        document['images'].append(
            {"id": image_id, "file_name": f"{image_id:06d}.png", "width": 64, "height": 64}
        )
        document['annotations'].append(
            {
                "id": image_id,
                "image_id": image_id,
                "category_id": _category(image_id),
                "bbox": list(_OBJECT_BBOX),
                "area": 400.0,
                "iscrowd": 0
            }
        )
    return document


def get_clean_dump(n_images=40):
    """One correct box per image plus a low-score background box kept only for ranking."""
    dump = []
    for image_id in range(1, n_images + 1):
        dump.append(
            {"image_id": image_id, "category_id": _category(image_id), "bbox": list(_OBJECT_BBOX), "score": 0.9}
        )
        dump.append(
            {"image_id": image_id, "category_id": _category(image_id), "bbox": list(_BACKGROUND_BBOX), "score": 0.1}
        )
    return dump


def get_quality_corruption_dump(n_images=40):
    """Counts preserved, every box displaced off its object."""
    return [
        {"image_id": image_id, "category_id": _category(image_id), "bbox": list(_DISPLACED_BBOX), "score": 0.9}
        for image_id in range(1, n_images + 1)
    ]


def get_suppression_dump(n_images=40):
    """Detections survive on the first tenth of the images only."""
    return [
        {"image_id": image_id, "category_id": _category(image_id), "bbox": list(_OBJECT_BBOX), "score": 0.9}
        for image_id in range(1, n_images // 10 + 1)
    ]


def get_dump_with_bad_record(n_images=40, index=3):
    dump = get_clean_dump(n_images)
    del dump[index]['score']
    return dump


def get_dump_with_negative_extent(n_images=40, index=1):
    dump = get_clean_dump(n_images)
    dump[index]['bbox'] = [4.0, 4.0, -2.0, 8.0]
    return dump


def get_dump_with_unknown_image(n_images=40):
    dump = get_clean_dump(n_images)
    dump.append({"image_id": n_images + 100, "category_id": 1, "bbox": list(_OBJECT_BBOX), "score": 0.9})
    return dump


################################################################################
#                               REFERENCE CELLS                                #
################################################################################

def get_reference_cells():
    return [
        {
            "model": model, "norm": norm, "eps": eps, "map_drop_pct": drop,
            "drr": drr, "qci": qci, "mode": mode
        }
        for model, norm, eps, drop, drr, qci, mode in _REFERENCE_CELLS
    ]


def get_report_rows():
    rows = []
    for row in get_reference_cells():
        rows.append({
            "model": row['model'],
            "norm": row['norm'],
            "eps": float(row['eps']),
            "steps": 10,
            "loss": "det_sum",
            "map_clean": 0.5,
            "map_adv": 0.5 * (1 - row['map_drop_pct'] / 100),
            "count_clean": 1000,
            "count_adv": int(round(1000 * (1 - row['drr'] / 100))),
            "drr": row['drr'],
            "map_drop_pct": row['map_drop_pct'],
            "qci": row['qci'],
            "mode": row['mode'],
            "negative_drop": False
        })
    return rows


################################################################################
#                              MODELS & SAMPLES                                #
################################################################################

def get_tiny_detector_dict():
    return deepcopy(_TINY_DETECTOR)


def get_tiny_detector_config(neuron='LIF', T=2, ann_twin=False, surrogate=None, **kwargs):
    values = get_tiny_detector_dict()
    values['substrate'] = SubstrateSpec.for_neuron(neuron, T)
    values['ann_twin'] = ann_twin
    if surrogate is not None:
        values['surrogate'] = surrogate
    values.update(kwargs)
    return DetectorConfig.from_dict(values)


def get_relaxed_detector_config(neuron='LIF', **kwargs):
    return get_tiny_detector_config(neuron, surrogate=SurrogateSpec(relaxed=True), **kwargs)


def get_sweep_config_dict():
    document = deepcopy(_SWEEP_CONFIG)
    for model in document['models']:
        config = get_tiny_detector_dict()
        config.update(model.get('config', {}))
        model['config'] = config
    return document


def get_tiny_samples(n_images=4, size=16, seed=0):
    rng = np.random.default_rng(seed)
    samples = []
    for image_id in range(1, n_images + 1):
        image = rng.uniform(0.0, 1.0, size=(3, size, size)).astype(np.float32)
        gt = GroundTruth(Box(2.0, 2.0, size / 2, size / 2), image_id % 3, image_id)
        samples.append(DetectionSample(image_id, image, [gt]))
    return samples
