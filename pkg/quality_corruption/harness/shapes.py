# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import json
import logging
import numpy as np
from dataclasses import dataclass
from pathlib import Path
from PIL import Image, ImageDraw
from tqdm import tqdm
from typing import List, Optional, Sequence, Tuple, Union
from . import harness_mapping
from .coco import load_annotations
from ..evaluation import DetectionSample
from ..exceptions import ConfigurationError
from ..hashing import ConfigMixin

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShapesDatasetConfig(ConfigMixin):
    n_images: int = 600
    image_size: int = 64
    min_shapes: int = 1
    max_shapes: int = 5
    min_extent: int = 10
    max_extent: int = 24
    seed: int = 0

    def __post_init__(self):
        if self.n_images < 0:
            raise ConfigurationError(f'Image count must be non-negative, got {self.n_images}')
        if not 1 <= self.min_shapes <= self.max_shapes:
            raise ConfigurationError(f'Invalid shape count range [{self.min_shapes}, {self.max_shapes}]')
        if not 2 <= self.min_extent <= self.max_extent <= self.image_size:
            raise ConfigurationError(
                f'Shape extent range [{self.min_extent}, {self.max_extent}] does not fit a {self.image_size}px image'
            )


class ShapesGenerator():
    """Circles, squares and triangles on a flat background, one PNG per image."""

    def __init__(self, cfg: ShapesDatasetConfig):
        self._cfg = cfg
        self._rng = np.random.default_rng(cfg.seed)

    def generate(self, image_id: int) -> Tuple[Image.Image, List[dict]]:
        size = self._cfg.image_size
        background = tuple(int(value) for value in self._rng.integers(0, 80, size=3))
        image = Image.new('RGB', (size, size), color=background)
        draw = ImageDraw.Draw(image)
        annotations = []
        count = int(self._rng.integers(self._cfg.min_shapes, self._cfg.max_shapes + 1))
        for _ in range(count):
            class_id = int(self._rng.integers(0, len(harness_mapping.shape_categories)))
            extent = int(self._rng.integers(self._cfg.min_extent, self._cfg.max_extent + 1))
            x = int(self._rng.integers(0, size - extent + 1))
            y = int(self._rng.integers(0, size - extent + 1))
            colour = tuple(int(value) for value in self._rng.integers(128, 256, size=3))
            category = harness_mapping.shape_categories[class_id]
            getattr(self, category['drawer'])(draw, x, y, extent, colour)
            annotations.append({
                'image_id': image_id,
                'category_id': category['id'],
                'bbox': [x, y, extent, extent],
                'area': extent * extent,
                'iscrowd': 0
            })
        return image, annotations

    ################################################################################
    #                                  DRAWERS                                     #
    ################################################################################

    @staticmethod
    def _draw_circle(draw: ImageDraw.ImageDraw, x: int, y: int, extent: int, colour: tuple):
        draw.ellipse([x, y, x + extent - 1, y + extent - 1], fill=colour)

    @staticmethod
    def _draw_square(draw: ImageDraw.ImageDraw, x: int, y: int, extent: int, colour: tuple):
        draw.rectangle([x, y, x + extent - 1, y + extent - 1], fill=colour)

    @staticmethod
    def _draw_triangle(draw: ImageDraw.ImageDraw, x: int, y: int, extent: int, colour: tuple):
        last = extent - 1
        draw.polygon([(x, y + last), (x + last, y + last), (x + last / 2, y)], fill=colour)


def generate_shapes(cfg: ShapesDatasetConfig, output: Union[str, Path], progress: bool = False) -> Path:
    """Write ``images/*.png`` and a COCO-style ``annotations.json`` under ``output``."""
    output = Path(output)
    images_dir = output / harness_mapping.images_directory
    images_dir.mkdir(parents=True, exist_ok=True)
    generator = ShapesGenerator(cfg)
    images, annotations = [], []
    for image_id in tqdm(range(1, cfg.n_images + 1), desc='shapes', disable=not progress):
        image, records = generator.generate(image_id)
        file_name = f'{image_id:06d}.png'
        image.save(images_dir / file_name, format='PNG')
        images.append({'id': image_id, 'file_name': file_name, 'width': cfg.image_size, 'height': cfg.image_size})
        for record in records:
            record['id'] = len(annotations) + 1
            annotations.append(record)
    document = {
        'info': {'description': 'synthetic shapes', 'config': cfg.to_plain(), 'config_hash': cfg.config_hash()},
        'images': images,
        'annotations': annotations,
        'categories': [
            {'id': category['id'], 'name': category['name']}
            for category in harness_mapping.shape_categories.values()
        ]
    }
    path = output / harness_mapping.annotations_file
    with open(path, 'wt', encoding='utf-8') as f:
        json.dump(document, f, indent=2, sort_keys=True)
    logger.info('Generated %d images with %d shapes in %s', len(images), len(annotations), output)
    return path


def read_image(path: Union[str, Path]) -> np.ndarray:
    with Image.open(path) as image:
        array = np.asarray(image.convert('RGB'), dtype=np.float32) / 255.0
    return np.ascontiguousarray(np.transpose(array, (2, 0, 1)))


def load_dataset(root: Union[str, Path], subset: Optional[int] = None,
                 image_ids: Optional[Sequence[int]] = None, by_id: bool = True) -> List[DetectionSample]:
    """DetectionSamples of a shapes (or any COCO-layout) directory.

    ``subset`` keeps the first N images, by ascending id unless ``by_id`` is
    False, in which case the annotation file order is kept.
    """
    root = Path(root)
    annotation_set = load_annotations(root / harness_mapping.annotations_file)
    gts = annotation_set.gts
    images = list(annotation_set.images)
    if by_id:
        images.sort(key=lambda image: image['id'])
    if image_ids is not None:
        wanted = set(image_ids)
        images = [image for image in images if image['id'] in wanted]
    if subset is not None:
        images = images[:subset]
    grouped = {image['id']: [] for image in images}
    for gt in gts:
        if gt.image_id in grouped:
            grouped[gt.image_id].append(gt)
    samples = [
        DetectionSample(image['id'], read_image(root / harness_mapping.images_directory / image['file_name']),
                        grouped[image['id']])
        for image in images
    ]
    logger.debug('Loaded %d samples from %s', len(samples), root)
    return samples


def split_dataset(samples: Sequence[DetectionSample], train_fraction: float = 0.8) -> Tuple[List[DetectionSample], List[DetectionSample]]:
    if not 0 < train_fraction < 1:
        raise ConfigurationError(f'Train fraction must lie in (0, 1), got {train_fraction}')
    cut = int(round(len(samples) * train_fraction))
    return list(samples[:cut]), list(samples[cut:])
