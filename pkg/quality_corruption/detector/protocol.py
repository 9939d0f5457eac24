# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass, field
from typing import Dict, List, Sequence
from .decoding import decode_grid
from .model import SpikingModel
from ..evaluation import (
    EVAL_CONFIDENCE, INFERENCE_CONFIDENCE, NMS_IOU, Detection, DetectionSample, GroundTruth,
    map50, nms
)


@dataclass
class ProtocolDetections():
    """Detections of one model over a set of images.

    ``ranked`` feeds mAP (confidence >= 0.001), ``emitted`` is the post-NMS
    output at the inference threshold that detection counts are taken from.
    """

    image_ids: List[int] = field(default_factory=list)
    ranked: Dict[int, List[Detection]] = field(default_factory=dict)
    emitted: Dict[int, List[Detection]] = field(default_factory=dict)

    def all_ranked(self) -> List[Detection]:
        return [det for image_id in self.image_ids for det in self.ranked[image_id]]

    def all_emitted(self) -> List[Detection]:
        return [det for image_id in self.image_ids for det in self.emitted[image_id]]

    def counts(self) -> Dict[int, int]:
        return {image_id: len(self.emitted[image_id]) for image_id in self.image_ids}

    @property
    def total_count(self) -> int:
        return sum(len(dets) for dets in self.emitted.values())


def detections_from_grids(grids: np.ndarray, cell_size: float, image_ids: Sequence[int],
                          conf_thresh: float = INFERENCE_CONFIDENCE,
                          iou_thresh: float = NMS_IOU) -> ProtocolDetections:
    result = ProtocolDetections()
    for grid, image_id in zip(grids, image_ids):
        candidates = decode_grid(grid, cell_size, EVAL_CONFIDENCE, int(image_id))
        result.image_ids.append(int(image_id))
        result.ranked[int(image_id)] = nms(candidates, EVAL_CONFIDENCE, iou_thresh)
        result.emitted[int(image_id)] = nms(candidates, conf_thresh, iou_thresh)
    return result


def run_protocol(model: SpikingModel, images: np.ndarray, image_ids: Sequence[int],
                 conf_thresh: float = INFERENCE_CONFIDENCE,
                 iou_thresh: float = NMS_IOU) -> ProtocolDetections:
    grids = model.predict(images)
    return detections_from_grids(grids, model.config.cell_size, image_ids, conf_thresh, iou_thresh)


def stack_samples(samples: Sequence[DetectionSample]):
    images = np.stack([sample.image for sample in samples]) if samples else np.zeros((0,))
    gts: List[GroundTruth] = [gt for sample in samples for gt in sample.gts]
    return images, [sample.image_id for sample in samples], gts


def evaluate_map(model: SpikingModel, samples: Sequence[DetectionSample]) -> float:
    images, image_ids, gts = stack_samples(samples)
    return map50(run_protocol(model, images, image_ids).all_ranked(), gts)
