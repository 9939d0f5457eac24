# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from dataclasses import asdict, dataclass
from tqdm import tqdm
from typing import Callable, Dict, List, Optional, Sequence, Tuple
from .model import RawHeadOutput, SpikingModel
from .optim import Adam
from .protocol import evaluate_map
from ..evaluation import DetectionSample
from ..exceptions import ConfigurationError, DivergenceError, NonFiniteError
from ..hashing import ConfigMixin
from ..numeric import (
    CompGraph, Tensor, add, bce_with_logits, cross_entropy, mul, reduce_sum, scale, sigmoid, sub
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingHyper(ConfigMixin):
    epochs: int = 30
    lr: float = 1e-3
    batch_size: int = 16
    box_weight: float = 5.0
    obj_weight: float = 1.0
    class_weight: float = 1.0
    seed: int = 0
    progress: bool = False

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigurationError(f'Epoch count must be non-negative, got {self.epochs}')
        if not self.lr > 0:
            raise ConfigurationError(f'Learning rate must be positive, got {self.lr}')
        if self.batch_size < 1:
            raise ConfigurationError(f'Batch size must be >= 1, got {self.batch_size}')


@dataclass
class EpochMetrics():
    epoch: int
    loss: float
    box_loss: float
    obj_loss: float
    class_loss: float
    map50: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def build_targets(samples: Sequence[DetectionSample], grid_size: int, cell_size: float) -> Dict[str, np.ndarray]:
    """Cell targets: the cell containing a box centre is responsible for it."""
    count = len(samples)
    targets = {
        'objectness': np.zeros((count, 1, grid_size, grid_size)),
        'offsets': np.zeros((count, 2, grid_size, grid_size)),
        'log_sizes': np.zeros((count, 2, grid_size, grid_size)),
        'classes': np.zeros((count, grid_size, grid_size)),
        'mask': np.zeros((count, grid_size, grid_size))
    }
    for index, sample in enumerate(samples):
        for gt in sample.gts:
            centre_x = (gt.box.x + gt.box.w / 2) / cell_size
            centre_y = (gt.box.y + gt.box.h / 2) / cell_size
            col = min(max(int(np.floor(centre_x)), 0), grid_size - 1)
            row = min(max(int(np.floor(centre_y)), 0), grid_size - 1)
            if targets['mask'][index, row, col]:
                continue
            targets['mask'][index, row, col] = 1.0
            targets['objectness'][index, 0, row, col] = 1.0
            targets['offsets'][index, :, row, col] = (centre_x - col, centre_y - row)
            targets['log_sizes'][index, :, row, col] = (
                np.log(max(gt.box.w, 1e-3) / cell_size), np.log(max(gt.box.h, 1e-3) / cell_size)
            )
            targets['classes'][index, row, col] = gt.class_id
    return targets


def detection_loss(raw: RawHeadOutput, targets: Dict[str, np.ndarray],
                   hyper: TrainingHyper) -> Tuple[Tensor, Dict[str, Tensor]]:
    mask = Tensor(targets['mask'][:, None])
    positives = max(float(targets['mask'].sum()), 1.0)
    offset_error = mul(sub(sigmoid(raw.offsets()), Tensor(targets['offsets'])), mask)
    size_error = mul(sub(raw.log_sizes(), Tensor(targets['log_sizes'])), mask)
    box = scale(
        add(reduce_sum(mul(offset_error, offset_error)), reduce_sum(mul(size_error, size_error))),
        1.0 / positives
    )
    objectness = bce_with_logits(raw.objectness(), targets['objectness'])
    classes = cross_entropy(raw.class_logits(), targets['classes'], targets['mask'], axis=1)
    total = add(
        add(scale(box, hyper.box_weight), scale(objectness, hyper.obj_weight)),
        scale(classes, hyper.class_weight)
    )
    return total, {'box': box, 'obj': objectness, 'class': classes}


def training_step(model: SpikingModel, optimizer: Adam, batch: Sequence[DetectionSample],
                  hyper: TrainingHyper) -> Dict[str, float]:
    config = model.config
    targets = build_targets(batch, config.grid_size, config.cell_size)
    parts: Dict[str, Tensor] = {}

    def graph_fn(images):
        raw, _ = model.forward(images)
        total, components = detection_loss(raw, targets, hyper)
        parts.update(components)
        return total

    graph = CompGraph(graph_fn)
    optimizer.zero_grad()
    loss = graph.forward(Tensor(np.stack([sample.image for sample in batch])))
    graph.backward()
    optimizer.step()
    values = {name: part.item() for name, part in parts.items()}
    values['loss'] = loss.item()
    return values


def train(model: SpikingModel, dataset: Sequence[DetectionSample], hyper: TrainingHyper,
          validation: Optional[Sequence[DetectionSample]] = None,
          on_epoch: Optional[Callable[[EpochMetrics], None]] = None) -> Tuple[SpikingModel, List[EpochMetrics]]:
    """Adam training on the detection loss; returns the model and per-epoch metrics."""
    if not dataset:
        raise ConfigurationError('Cannot train on an empty dataset.')
    history: List[EpochMetrics] = []
    if hyper.epochs == 0:
        return model, history
    rng = np.random.default_rng(hyper.seed)
    optimizer = Adam(model.parameters(), lr=hyper.lr)
    epochs = tqdm(range(1, hyper.epochs + 1), desc=f'train {model.model_id}', disable=not hyper.progress)
    with model.trainable():
        for epoch in epochs:
            totals = {'loss': 0.0, 'box': 0.0, 'obj': 0.0, 'class': 0.0}
            order = rng.permutation(len(dataset))
            batches = 0
            for start in range(0, len(order), hyper.batch_size):
                batch = [dataset[index] for index in order[start:start + hyper.batch_size]]
                try:
                    values = training_step(model, optimizer, batch, hyper)
                except NonFiniteError as error:
                    raise DivergenceError(
                        f'Training of {model.model_id} diverged in epoch {epoch}: {error}', history
                    ) from error
                for name in totals:
                    totals[name] += values[name]
                batches += 1
            metrics = EpochMetrics(
                epoch=epoch,
                loss=totals['loss'] / batches,
                box_loss=totals['box'] / batches,
                obj_loss=totals['obj'] / batches,
                class_loss=totals['class'] / batches
            )
            if validation:
                metrics.map50 = evaluate_map(model, validation)
            history.append(metrics)
            logger.info('Epoch %d of %s: loss %.4f map50 %s', epoch, model.model_id, metrics.loss, metrics.map50)
            if on_epoch is not None:
                on_epoch(metrics)
    return model, history
