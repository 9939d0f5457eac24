# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import threading
import numpy as np
from contextlib import contextmanager
from dataclasses import dataclass, field
from scipy.special import logit
from typing import Callable, List, Optional, Tuple
from . import detector_mapping
from .config import DetectorConfig
from ..exceptions import InputRangeError, ShapeMismatchError
from ..numeric import (
    CompGraph, Tensor, add, conv2d, relu, reshape, scale, spike_threshold, take
)
from ..substrate import InputEncoder, MembraneState, SpikingNeuron

logger = logging.getLogger(__name__)

Objective = Callable[['RawHeadOutput', Optional['MembraneTrace']], Tensor]


@dataclass
class RawHeadOutput():
    """Head tensor [N, 5 + C, S, S]; cell layout defined in detector_mapping."""

    tensor: Tensor
    cell_size: float

    @classmethod
    def from_grid(cls, grid: np.ndarray, cell_size: float) -> 'RawHeadOutput':
        grid = np.asarray(grid)
        return cls(Tensor(np.transpose(grid, (2, 0, 1))[None]), cell_size)

    @property
    def grid_size(self) -> int:
        return self.tensor.shape[-1]

    @property
    def num_classes(self) -> int:
        return self.tensor.shape[1] - detector_mapping.CLASS_START

    def objectness(self) -> Tensor:
        return take(self.tensor, *detector_mapping.OBJECTNESS, axis=1)

    def offsets(self) -> Tensor:
        return take(self.tensor, *detector_mapping.OFFSETS, axis=1)

    def log_sizes(self) -> Tensor:
        return take(self.tensor, *detector_mapping.LOG_SIZES, axis=1)

    def class_logits(self) -> Tensor:
        return take(self.tensor, detector_mapping.CLASS_START, self.tensor.shape[1], axis=1)

    def grid(self, index: int = 0) -> np.ndarray:
        return np.transpose(self.tensor.data[index], (1, 2, 0))


@dataclass
class MembraneTrace():
    """Pre-reset membrane potentials, one list of timesteps per spiking layer."""

    layers: List[List[Tensor]] = field(default_factory=list)

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    def arrays(self) -> List[np.ndarray]:
        return [np.stack([step.data for step in layer]) for layer in self.layers]

    def detached(self) -> 'MembraneTrace':
        return MembraneTrace([[step.detach() for step in layer] for layer in self.layers])


class SpikingModel():
    def __init__(self, config: DetectorConfig, model_id: Optional[str] = None):
        self._config = config
        self._model_id = model_id or self._default_id(config)
        self._encoder = InputEncoder('direct')
        self._neuron = None if config.ann_twin else SpikingNeuron(config.neuron_params())
        self._query_lock = threading.Lock()
        self._gradient_queries = 0
        self._initialise_weights()

    def __repr__(self):
        return f'<SpikingModel {self._model_id} spiking_layers={self.spiking_layer_count}>'

    @staticmethod
    def _default_id(config: DetectorConfig) -> str:
        if config.ann_twin:
            return f'ann-{config.ann_activation}'
        return f'snn-{config.substrate.neuron}-T{config.substrate.T}'

    def _initialise_weights(self):
        rng = np.random.default_rng(self._config.seed)
        self._backbone: List[Tuple[Tensor, Tensor]] = []
        in_channels = 3
        for out_channels in self._config.channels:
            fan_in = in_channels * 9
            weight = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(out_channels, in_channels, 3, 3))
            self._backbone.append((Tensor(weight), Tensor(np.zeros(out_channels))))
            in_channels = out_channels
        head_weight = rng.normal(0.0, np.sqrt(1.0 / in_channels), size=(self._config.head_channels, in_channels, 1, 1))
        head_bias = np.zeros(self._config.head_channels)
        head_bias[detector_mapping.OBJECTNESS[0]] = logit(detector_mapping.OBJECTNESS_PRIOR)
        self._head = (Tensor(head_weight), Tensor(head_bias))

    ################################################################################
    #                                 PROPERTIES                                   #
    ################################################################################

    @property
    def config(self) -> DetectorConfig:
        return self._config

    @property
    def model_id(self) -> str:
        return self._model_id

    @property
    def spiking_layer_count(self) -> int:
        return 0 if self._neuron is None else len(self._backbone)

    @property
    def gradient_queries(self) -> int:
        with self._query_lock:
            return self._gradient_queries

    @property
    def input_shape(self) -> Tuple[int, int, int]:
        size = self._config.input_size
        return (3, size, size)

    def parameters(self) -> List[Tensor]:
        params = [tensor for layer in self._backbone for tensor in layer]
        params.extend(self._head)
        return params

    def state_arrays(self) -> List[np.ndarray]:
        return [param.data.copy() for param in self.parameters()]

    def load_state_arrays(self, arrays: List[np.ndarray]):
        params = self.parameters()
        if len(arrays) != len(params):
            raise ShapeMismatchError(f'Expected {len(params)} weight arrays, got {len(arrays)}')
        for param, array in zip(params, arrays):
            if param.shape != tuple(array.shape):
                raise ShapeMismatchError(f'Weight shape {array.shape} != expected {param.shape}')
            param.data = np.asarray(array, dtype=param.data.dtype).copy()

    @contextmanager
    def trainable(self):
        params = self.parameters()
        for param in params:
            param.requires_grad = True
            param.zero_grad()
        try:
            yield params
        finally:
            for param in params:
                param.requires_grad = False
                param.zero_grad()

    ################################################################################
    #                                FORWARD PASS                                  #
    ################################################################################

    def forward(self, x: Tensor, capture: bool = False) -> Tuple[RawHeadOutput, Optional[MembraneTrace]]:
        if x.ndim == 3:
            x = reshape(x, (1,) + tuple(x.shape))
        if tuple(x.shape[1:]) != self.input_shape:
            raise ShapeMismatchError(f'Model expects images of shape {self.input_shape}, got {x.shape[1:]}')
        head, trace = getattr(self, detector_mapping.forward_mapping[self._neuron is None])(x, capture)
        return RawHeadOutput(head, self._config.cell_size), trace

    def _conv(self, index: int, h: Tensor) -> Tensor:
        weight, bias = self._backbone[index]
        return conv2d(h, weight, bias, stride=self._config.strides[index], padding=1)

    def _head_conv(self, h: Tensor) -> Tensor:
        return conv2d(h, *self._head)

    def _ann_forward(self, x: Tensor, capture: bool):
        activation = getattr(self, detector_mapping.ann_activation_mapping[self._config.ann_activation])
        h = x
        for index in range(len(self._backbone)):
            h = activation(self._conv(index, h))
        trace = MembraneTrace() if capture else None
        return scale(self._head_conv(h), 1.0), trace

    def _relu_activation(self, z: Tensor) -> Tensor:
        return relu(z)

    def _threshold_activation(self, z: Tensor) -> Tensor:
        return spike_threshold(z, self._config.v_th, self._config.surrogate)

    def _spiking_forward(self, x: Tensor, capture: bool):
        T = self._config.timesteps
        currents = self._encoder.encode(x, T)
        states: List[Optional[MembraneState]] = [None] * len(self._backbone)
        trace = MembraneTrace([[] for _ in self._backbone]) if capture else None
        first_layer_cache = {}
        accumulated = None
        for t in range(T):
            h = currents[t]
            for index in range(len(self._backbone)):
                if index == 0:
                    # constant-current encoding feeds the same tensor every step
                    key = id(h)
                    if key not in first_layer_cache:
                        first_layer_cache[key] = self._conv(0, h)
                    z = first_layer_cache[key]
                else:
                    z = self._conv(index, h)
                if states[index] is None:
                    states[index] = MembraneState.initial(z.shape, T)
                states[index], h = self._neuron.step(states[index], z)
                if trace is not None:
                    trace.layers[index].append(states[index].potential)
            readout = self._head_conv(h)
            accumulated = readout if accumulated is None else add(accumulated, readout)
        # membrane-potential readout averaged over T
        return scale(accumulated, 1.0 / T), trace

    ################################################################################
    #                           GRADIENT AND INFERENCE                             #
    ################################################################################

    def input_gradient(self, image: np.ndarray, objective: Objective,
                       capture: bool = False) -> Tuple[float, np.ndarray]:
        """Loss value and its gradient w.r.t. one CHW image; counts as one gradient query."""
        def graph_fn(x):
            raw, trace = self.forward(x, capture)
            return objective(raw, trace)
        graph = CompGraph(graph_fn)
        loss = graph.forward(Tensor(image, requires_grad=True), expected_shapes=[self.input_shape])
        gradient = graph.backward()[0]
        with self._query_lock:
            self._gradient_queries += 1
        return loss.item(), gradient

    def predict(self, images: np.ndarray, batch_size: int = 32) -> np.ndarray:
        """Raw head grids [N, S, S, 5 + C] for a stack of CHW images."""
        images = np.asarray(images)
        _check_pixels(images)
        grids = []
        for start in range(0, len(images), batch_size):
            raw, _ = self.forward(Tensor(images[start:start + batch_size]))
            grids.append(np.transpose(raw.tensor.data, (0, 2, 3, 1)))
        if not grids:
            size = self._config.grid_size
            return np.zeros((0, size, size, self._config.head_channels))
        return np.concatenate(grids)


def _check_pixels(images: np.ndarray):
    if images.size and (images.min() < 0 or images.max() > 1):
        raise InputRangeError(f'Pixel values must lie in [0, 1], got [{images.min()}, {images.max()}]')


def build_detector(cfg: DetectorConfig, model_id: Optional[str] = None) -> SpikingModel:
    model = SpikingModel(cfg, model_id)
    logger.debug('Built %r with %d parameters', model, sum(param.data.size for param in model.parameters()))
    return model


def infer(model: SpikingModel, image: np.ndarray,
          capture: bool = False) -> Tuple[RawHeadOutput, Optional[MembraneTrace]]:
    image = np.asarray(image)
    if tuple(image.shape) != model.input_shape:
        raise ShapeMismatchError(f'Model expects an image of shape {model.input_shape}, got {image.shape}')
    _check_pixels(image)
    return model.forward(Tensor(image), capture)
