# -*- coding: utf-8 -*-
#!/usr/bin/env python3

from dataclasses import dataclass
from enum import Enum
from typing import Dict
from . import substrate_mapping
from ..exceptions import ConfigurationError
from ..hashing import ConfigMixin


class Deployability(str, Enum):
    HARDWARE_DEPLOYABLE = 'HardwareDeployable'
    NON_DEPLOYABLE = 'NonDeployable'


@dataclass(frozen=True)
class SubstrateSpec(ConfigMixin):
    """Computational substrate of a spiking detector.

    The three flags are the neuromorphic-chip constraints: (i) binary spikes,
    (ii) accumulate-only arithmetic, (iii) no dense matrix multiplication.
    """

    encoding: str = 'binary01'
    neuron: str = 'LIF'
    T: int = 4
    c1_binary_spikes: str = 'yes'
    c2_ac_only: bool = True
    c3_no_dense_matmul: bool = True

    def __post_init__(self):
        expected = substrate_mapping.encoding_binary_constraint.get(self.encoding)
        if expected is None:
            raise ConfigurationError(f'Unknown spike encoding: {self.encoding}')
        if self.neuron not in substrate_mapping.substrate_neuron_kinds:
            raise ConfigurationError(f'Unknown neuron kind: {self.neuron}')
        if self.T < 1:
            raise ConfigurationError(f'Temporal depth must be >= 1, got {self.T}')
        if self.c1_binary_spikes != expected:
            raise ConfigurationError(
                f'Encoding {self.encoding} implies c1 = {expected}, got {self.c1_binary_spikes}'
            )

    @classmethod
    def for_neuron(cls, neuron: str, T: int, c2_ac_only: bool = True,
                   c3_no_dense_matmul: bool = True) -> 'SubstrateSpec':
        encoding = substrate_mapping.neuron_encoding_mapping[neuron]
        return cls(
            encoding=encoding,
            neuron=neuron,
            T=T,
            c1_binary_spikes=substrate_mapping.encoding_binary_constraint[encoding],
            c2_ac_only=c2_ac_only,
            c3_no_dense_matmul=c3_no_dense_matmul
        )


def classify_substrate(spec: SubstrateSpec) -> Deployability:
    if spec.c1_binary_spikes == 'yes' and spec.c2_ac_only and spec.c3_no_dense_matmul:
        return Deployability.HARDWARE_DEPLOYABLE
    return Deployability.NON_DEPLOYABLE


def reference_substrates() -> Dict[str, SubstrateSpec]:
    references = {}
    for name, row in substrate_mapping.reference_detectors.items():
        fields = {key: value for key, value in row.items() if key != 'ann_reference'}
        references[name] = SubstrateSpec(**fields)
    return references
