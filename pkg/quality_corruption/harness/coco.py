# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
from . import harness_mapping
from ..detector import ProtocolDetections
from ..evaluation import (
    EVAL_CONFIDENCE, INFERENCE_CONFIDENCE, Box, Detection, GroundTruth
)
from ..exceptions import GeometryError, SchemaError

logger = logging.getLogger(__name__)

JsonSource = Union[str, Path, dict, list]


def _load_json(source: JsonSource):
    if isinstance(source, (dict, list)):
        return source
    with open(source, 'rt', encoding='utf-8') as f:
        return json.load(f)


def _check_fields(record: dict, expected: dict, index: int, kind: str):
    if not isinstance(record, dict):
        raise SchemaError(f'{kind} record is not an object', index)
    for name, types in expected.items():
        if name not in record:
            raise SchemaError(f'{kind} record misses the "{name}" field', index)
        if isinstance(record[name], bool) or not isinstance(record[name], types):
            raise SchemaError(f'{kind} field "{name}" has type {type(record[name]).__name__}', index)


def _read_bbox(record: dict, index: int) -> Box:
    bbox = record['bbox']
    if len(bbox) != 4 or not all(isinstance(value, (int, float)) and not isinstance(value, bool) for value in bbox):
        raise SchemaError(f'bbox must hold four numbers, got {bbox}', index)
    if bbox[2] < 0 or bbox[3] < 0:
        raise SchemaError(f'bbox has a negative extent: {bbox}', index)
    return Box(*bbox)


class CategoryIndex():
    """COCO category ids <-> contiguous class indices, in ascending id order."""

    def __init__(self, category_ids: Sequence[int]):
        self._ids = sorted(set(category_ids))
        self._classes = {category_id: index for index, category_id in enumerate(self._ids)}

    def __len__(self):
        return len(self._ids)

    @classmethod
    def from_document(cls, document: dict) -> 'CategoryIndex':
        categories = document.get('categories')
        if categories:
            return cls([category['id'] for category in categories])
        return cls([record['category_id'] for record in document.get('annotations', [])])

    def to_class(self, category_id: int, index: int = -1) -> int:
        try:
            return self._classes[category_id]
        except KeyError:
            raise SchemaError(f'Unknown category_id {category_id}', index)

    def to_category(self, class_id: int) -> int:
        try:
            return self._ids[class_id]
        except IndexError:
            raise SchemaError(f'Unknown class index {class_id}')


@dataclass
class AnnotationSet():
    images: List[dict] = field(default_factory=list)
    gts: List[GroundTruth] = field(default_factory=list)
    categories: CategoryIndex = field(default_factory=lambda: CategoryIndex([]))

    @property
    def image_ids(self) -> List[int]:
        return sorted(image['id'] for image in self.images)


def load_annotations(annotations: JsonSource) -> AnnotationSet:
    document = _load_json(annotations)
    if not isinstance(document, dict):
        raise SchemaError('Annotation document must be a JSON object')
    for key in ('images', 'annotations'):
        if not isinstance(document.get(key), list):
            raise SchemaError(f'Annotation document misses the "{key}" list')
    for index, image in enumerate(document['images']):
        _check_fields(image, harness_mapping.image_fields, index, 'image')
    known = {image['id'] for image in document['images']}
    categories = CategoryIndex.from_document(document)
    gts = []
    for index, record in enumerate(document['annotations']):
        _check_fields(record, harness_mapping.annotation_fields, index, 'annotation')
        if record['image_id'] not in known:
            raise SchemaError(f'annotation refers to unknown image {record["image_id"]}', index)
        gts.append(GroundTruth(
            _read_bbox(record, index), categories.to_class(record['category_id'], index), record['image_id']
        ))
    return AnnotationSet(document['images'], gts, categories)


class DetectionDumpParser():
    """COCO results list (image_id, category_id, bbox, score) -> Detections.

    Strict parsing raises SchemaError on the first bad record; lenient parsing
    records it in ``errors`` and skips it.
    """

    def __init__(self, categories: CategoryIndex, image_ids: Optional[Sequence[int]] = None, strict: bool = True):
        self._categories = categories
        self._image_ids = None if image_ids is None else set(image_ids)
        self._strict = strict
        self._errors: List[str] = []
        self._warnings = set()

    @property
    def errors(self) -> List[str]:
        return self._errors

    @property
    def warnings(self) -> set:
        return self._warnings

    def parse(self, dump: JsonSource) -> List[Detection]:
        records = _load_json(dump)
        if not isinstance(records, list):
            raise SchemaError('A detection dump must be a JSON list of result records')
        detections = []
        for index, record in enumerate(records):
            try:
                detection = self._parse_record(record, index)
            except SchemaError as error:
                if self._strict:
                    raise
                self._errors.append(str(error))
                logger.error('Skipping dump record: %s', error)
                continue
            if detection is not None:
                detections.append(detection)
        return detections

    def _parse_record(self, record: dict, index: int) -> Optional[Detection]:
        _check_fields(record, harness_mapping.result_fields, index, 'result')
        if self._image_ids is not None and record['image_id'] not in self._image_ids:
            self._warnings.add(f'Results for image {record["image_id"]} which is not annotated are ignored.')
            return None
        class_id = self._categories.to_class(record['category_id'], index)
        try:
            return Detection(_read_bbox(record, index), class_id, record['score'], record['image_id'])
        except GeometryError as error:
            raise SchemaError(str(error), index)


def protocol_from_detections(detections: Sequence[Detection], image_ids: Sequence[int],
                             conf_thresh: float = INFERENCE_CONFIDENCE) -> ProtocolDetections:
    """Dumped detections audited as given: no extra NMS, only the two score cut-offs."""
    result = ProtocolDetections(list(image_ids), {image_id: [] for image_id in image_ids},
                                {image_id: [] for image_id in image_ids})
    for detection in detections:
        if detection.confidence >= EVAL_CONFIDENCE:
            result.ranked[detection.image_id].append(detection)
        if detection.confidence >= conf_thresh:
            result.emitted[detection.image_id].append(detection)
    return result


@dataclass
class AuditInputs():
    annotations: AnnotationSet
    clean: ProtocolDetections
    adversarial: ProtocolDetections
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def load_coco(annotations: JsonSource, clean_dump: JsonSource, adv_dump: JsonSource,
              conf_thresh: float = INFERENCE_CONFIDENCE, strict: bool = True) -> AuditInputs:
    annotation_set = load_annotations(annotations)
    image_ids = annotation_set.image_ids
    parsed: Dict[str, ProtocolDetections] = {}
    errors, warnings = [], set()
    for name, dump in (('clean', clean_dump), ('adversarial', adv_dump)):
        parser = DetectionDumpParser(annotation_set.categories, image_ids, strict)
        detections = parser.parse(dump)
        parsed[name] = protocol_from_detections(detections, image_ids, conf_thresh)
        errors.extend(f'{name}: {error}' for error in parser.errors)
        warnings.update(parser.warnings)
        logger.debug('Parsed %d %s detections', len(detections), name)
    return AuditInputs(annotation_set, parsed['clean'], parsed['adversarial'], errors, sorted(warnings))


def detection_records(detections: Sequence[Detection], categories: CategoryIndex) -> List[dict]:
    return [
        {
            'image_id': detection.image_id,
            'category_id': categories.to_category(detection.class_id),
            'bbox': [float(value) for value in detection.box.as_xywh()],
            'score': float(detection.confidence)
        }
        for detection in detections
    ]


def write_detection_dump(detections: Sequence[Detection], categories: CategoryIndex,
                         path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wt', encoding='utf-8') as f:
        json.dump(detection_records(detections, categories), f)
    return path


def write_protocol_dump(protocol: ProtocolDetections, categories: CategoryIndex,
                        path: Union[str, Path]) -> Tuple[Path, int]:
    """Ranked detections of a protocol run as a COCO results file."""
    detections = protocol.all_ranked()
    return write_detection_dump(detections, categories, path), len(detections)
