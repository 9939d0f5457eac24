# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import math
from dataclasses import dataclass, field
from typing import Tuple
from . import detector_mapping
from ..exceptions import ConfigurationError
from ..hashing import ConfigMixin
from ..numeric import SurrogateSpec
from ..substrate import NeuronParams, SubstrateSpec


@dataclass(frozen=True)
class DetectorConfig(ConfigMixin):
    input_size: int = 64
    channels: Tuple[int, ...] = (8, 16, 32, 32)
    grid_size: int = 8
    num_classes: int = 3
    substrate: SubstrateSpec = field(default_factory=SubstrateSpec)
    ann_twin: bool = False
    ann_activation: str = 'relu'
    beta: float = 0.5
    v_th: float = 1.0
    d_max: int = 4
    surrogate: SurrogateSpec = field(default_factory=SurrogateSpec)
    seed: int = 0

    def __post_init__(self):
        if self.num_classes < 1:
            raise ConfigurationError(f'Need at least one class, got {self.num_classes}')
        if self.grid_size < 1 or self.input_size % self.grid_size:
            raise ConfigurationError(
                f'Input size {self.input_size} is not divisible by grid size {self.grid_size}'
            )
        ratio = self.input_size // self.grid_size
        if ratio & (ratio - 1):
            raise ConfigurationError(f'Downsampling ratio {ratio} is not a power of two')
        if self.downsampling_stages > len(self.channels):
            raise ConfigurationError(
                f'{len(self.channels)} backbone stages cannot downsample by {ratio}'
            )
        if self.ann_activation not in detector_mapping.ann_activation_mapping:
            raise ConfigurationError(f'Unknown ANN activation: {self.ann_activation}')
        # validates the neuron fields
        self.neuron_params()

    @property
    def downsampling_stages(self) -> int:
        return int(math.log2(self.input_size // self.grid_size))

    @property
    def strides(self) -> Tuple[int, ...]:
        down = self.downsampling_stages
        return tuple(2 if index < down else 1 for index in range(len(self.channels)))

    @property
    def head_channels(self) -> int:
        return detector_mapping.CLASS_START + self.num_classes

    @property
    def cell_size(self) -> float:
        return self.input_size / self.grid_size

    @property
    def timesteps(self) -> int:
        return 1 if self.ann_twin else self.substrate.T

    def neuron_params(self) -> NeuronParams:
        return NeuronParams(
            beta=self.beta,
            v_th=self.v_th,
            kind=self.substrate.neuron,
            d_max=self.d_max,
            surrogate=self.surrogate
        )

    @classmethod
    def from_dict(cls, values: dict) -> 'DetectorConfig':
        values = dict(values)
        if isinstance(values.get('substrate'), dict):
            values['substrate'] = SubstrateSpec(**values['substrate'])
        if isinstance(values.get('surrogate'), dict):
            values['surrogate'] = SurrogateSpec(**values['surrogate'])
        if 'channels' in values:
            values['channels'] = tuple(values['channels'])
        return cls(**values)
