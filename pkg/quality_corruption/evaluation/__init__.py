from .boxes import Box, Detection, DetectionSample, GroundTruth, iou, iou_matrix
from .ranking import (
    EVAL_CONFIDENCE, INFERENCE_CONFIDENCE, MATCH_IOU, NMS_IOU, average_precision, map50,
    match, nms, per_image_precision, precision_recall
)
