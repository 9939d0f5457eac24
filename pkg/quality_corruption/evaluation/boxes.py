# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass
from typing import Sequence
from ..exceptions import GeometryError


@dataclass(frozen=True)
class Box():
    """Axis-aligned box in pixels: top-left corner plus extent."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise GeometryError(f'Box extent must be non-negative, got w={self.w}, h={self.h}')

    @property
    def area(self) -> float:
        return self.w * self.h

    def as_xywh(self) -> list:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class Detection():
    box: Box
    class_id: int
    confidence: float
    image_id: int = 0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise GeometryError(f'Detection confidence must lie in [0, 1], got {self.confidence}')


@dataclass(frozen=True)
class GroundTruth():
    box: Box
    class_id: int
    image_id: int = 0


def iou(a: Box, b: Box) -> float:
    inter_w = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    inter_h = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    intersection = max(inter_w, 0.0) * max(inter_h, 0.0)
    union = a.area + b.area - intersection
    if union <= 0:
        return 0.0
    return intersection / union


def boxes_to_array(boxes: Sequence[Box]) -> np.ndarray:
    if not boxes:
        return np.zeros((0, 4), dtype=np.float64)
    return np.array([box.as_xywh() for box in boxes], dtype=np.float64)


def iou_matrix(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Pairwise IoU of two [N, 4] / [M, 4] xywh arrays."""
    left = np.maximum(first[:, None, 0], second[None, :, 0])
    top = np.maximum(first[:, None, 1], second[None, :, 1])
    right = np.minimum(first[:, None, 0] + first[:, None, 2], second[None, :, 0] + second[None, :, 2])
    bottom = np.minimum(first[:, None, 1] + first[:, None, 3], second[None, :, 1] + second[None, :, 3])
    intersection = np.clip(right - left, 0, None) * np.clip(bottom - top, 0, None)
    union = (first[:, 2] * first[:, 3])[:, None] + (second[:, 2] * second[:, 3])[None, :] - intersection
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(union > 0, intersection / np.where(union > 0, union, 1.0), 0.0)


@dataclass
class DetectionSample():
    """One image (CHW, values in [0, 1]) with its ground truth."""

    image_id: int
    image: np.ndarray
    gts: Sequence[GroundTruth]
