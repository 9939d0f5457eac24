# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from scipy.special import expit, softmax
from typing import List
from . import detector_mapping
from .model import RawHeadOutput
from ..evaluation import Box, Detection


def decode_grid(grid: np.ndarray, cell_size: float, conf_thresh: float,
                image_id: int = 0) -> List[Detection]:
    """One candidate per cell of a [S, S, 5 + C] grid, filtered by confidence."""
    grid = np.asarray(grid, dtype=np.float64)
    rows, cols = np.indices(grid.shape[:2])
    objectness = expit(grid[..., detector_mapping.OBJECTNESS[0]])
    offsets = expit(grid[..., slice(*detector_mapping.OFFSETS)])
    log_sizes = np.clip(grid[..., slice(*detector_mapping.LOG_SIZES)],
                        -detector_mapping.LOG_SIZE_CLIP, detector_mapping.LOG_SIZE_CLIP)
    class_probabilities = softmax(grid[..., detector_mapping.CLASS_START:], axis=-1)
    confidence = objectness * class_probabilities.max(axis=-1)
    classes = class_probabilities.argmax(axis=-1)
    centre_x = (cols + offsets[..., 0]) * cell_size
    centre_y = (rows + offsets[..., 1]) * cell_size
    widths = np.exp(log_sizes[..., 0]) * cell_size
    heights = np.exp(log_sizes[..., 1]) * cell_size
    detections = []
    for row, col in zip(*np.nonzero(confidence >= conf_thresh)):
        box = Box(
            float(centre_x[row, col] - widths[row, col] / 2),
            float(centre_y[row, col] - heights[row, col] / 2),
            float(widths[row, col]),
            float(heights[row, col])
        )
        detections.append(
            Detection(box, int(classes[row, col]), float(min(confidence[row, col], 1.0)), image_id)
        )
    return detections


def decode_head(raw: RawHeadOutput, conf_thresh: float, image_id: int = 0, index: int = 0) -> List[Detection]:
    return decode_grid(raw.grid(index), raw.cell_size, conf_thresh, image_id)
