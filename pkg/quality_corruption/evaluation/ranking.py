# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple
from ..exceptions import UndefinedMetricError
from .boxes import Detection, GroundTruth, boxes_to_array, iou_matrix

INFERENCE_CONFIDENCE = 0.25
NMS_IOU = 0.65
MATCH_IOU = 0.50
EVAL_CONFIDENCE = 0.001
RECALL_POINTS = np.linspace(0.0, 1.0, 101)


def confidence_order(dets: Sequence[Detection]) -> List[int]:
    # descending confidence, lower original index first on ties
    return sorted(range(len(dets)), key=lambda index: (-dets[index].confidence, index))


def nms(dets: Sequence[Detection], conf_thresh: float = INFERENCE_CONFIDENCE,
        iou_thresh: float = NMS_IOU) -> List[Detection]:
    groups: Dict[Tuple[int, int], List[int]] = defaultdict(list)
    for index in confidence_order(dets):
        det = dets[index]
        if det.confidence >= conf_thresh:
            groups[(det.image_id, det.class_id)].append(index)
    kept = []
    for indices in groups.values():
        boxes = boxes_to_array([dets[i].box for i in indices])
        overlaps = iou_matrix(boxes, boxes)
        suppressed = np.zeros(len(indices), dtype=bool)
        for position, index in enumerate(indices):
            if suppressed[position]:
                continue
            kept.append(index)
            suppressed |= overlaps[position] > iou_thresh
    return [dets[index] for index in sorted(kept)]


def match(dets: Sequence[Detection], gts: Sequence[GroundTruth],
          iou_thresh: float = MATCH_IOU) -> List[int]:
    """Greedy matching in confidence order.

    Returns, for every detection (in input order), the index of the ground
    truth it claimed or -1 when it stays unmatched.
    """
    assignment = [-1] * len(dets)
    if not dets or not gts:
        return assignment
    overlaps = iou_matrix(boxes_to_array([det.box for det in dets]), boxes_to_array([gt.box for gt in gts]))
    claimed = np.zeros(len(gts), dtype=bool)
    for index in confidence_order(dets):
        det = dets[index]
        best, best_iou = -1, iou_thresh
        for gt_index, gt in enumerate(gts):
            if claimed[gt_index] or gt.class_id != det.class_id or gt.image_id != det.image_id:
                continue
            if overlaps[index, gt_index] >= best_iou and (best < 0 or overlaps[index, gt_index] > best_iou):
                best, best_iou = gt_index, overlaps[index, gt_index]
        if best >= 0:
            claimed[best] = True
            assignment[index] = best
    return assignment


def precision_recall(dets: Sequence[Detection], gts: Sequence[GroundTruth]) -> Tuple[np.ndarray, np.ndarray]:
    """Cumulative precision and recall over confidence-ranked detections of one class."""
    order = confidence_order(dets)
    ranked = [dets[index] for index in order]
    positives = np.array([gt_index >= 0 for gt_index in match(ranked, gts)], dtype=np.float64)
    true_positives = np.cumsum(positives)
    false_positives = np.cumsum(1.0 - positives)
    recall = true_positives / len(gts)
    precision = true_positives / np.maximum(true_positives + false_positives, np.finfo(np.float64).eps)
    return precision, recall


def average_precision(dets: Sequence[Detection], gts: Sequence[GroundTruth]) -> float:
    if not gts:
        raise UndefinedMetricError('Average precision needs at least one ground-truth box.')
    if not dets:
        return 0.0
    precision, recall = precision_recall(dets, gts)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    positions = np.searchsorted(recall, RECALL_POINTS, side='left')
    sampled = np.where(positions < len(envelope), envelope[np.minimum(positions, len(envelope) - 1)], 0.0)
    return float(np.mean(sampled))


def map50(dets: Sequence[Detection], gts: Sequence[GroundTruth]) -> float:
    """COCO-style AP at IoU 0.50, averaged over the classes present in the ground truth."""
    if not gts:
        raise UndefinedMetricError('mAP is undefined without ground truth.')
    by_class_gts: Dict[int, List[GroundTruth]] = defaultdict(list)
    for gt in gts:
        by_class_gts[gt.class_id].append(gt)
    by_class_dets: Dict[int, List[Detection]] = defaultdict(list)
    for det in dets:
        by_class_dets[det.class_id].append(det)
    scores = [
        average_precision(by_class_dets.get(class_id, []), class_gts)
        for class_id, class_gts in sorted(by_class_gts.items())
    ]
    return float(np.mean(scores))


def per_image_precision(dets: Sequence[Detection], gts: Sequence[GroundTruth]) -> Optional[float]:
    """Fraction of detections matching a ground-truth box; None when there are no detections."""
    if not dets:
        return None
    matched = sum(1 for gt_index in match(dets, gts) if gt_index >= 0)
    return matched / len(dets)
