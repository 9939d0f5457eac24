# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
from . import substrate_mapping
from ..exceptions import (ConfigurationError, GraphStateError, ShapeMismatchError,
                          SpikeRangeError)
from ..hashing import ConfigMixin
from ..numeric import SurrogateSpec, Tensor, add, mul, scale, spike_threshold, sub

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeuronParams(ConfigMixin):
    beta: float = 0.5
    v_th: float = 1.0
    kind: str = 'LIF'
    d_max: int = 4
    surrogate: SurrogateSpec = field(default_factory=SurrogateSpec)

    def __post_init__(self):
        if self.kind not in substrate_mapping.substrate_neuron_kinds:
            raise ConfigurationError(f'Unknown neuron kind: {self.kind}')
        if not 0 < self.beta <= 1:
            raise ConfigurationError(f'Leak factor must lie in (0, 1], got {self.beta}')
        if not self.v_th > 0:
            raise ConfigurationError(f'Threshold must be positive, got {self.v_th}')
        if self.kind == 'I-LIF' and self.d_max < 1:
            raise ConfigurationError(f'I-LIF needs d_max >= 1, got {self.d_max}')


@dataclass
class MembraneState():
    """Membrane potential of one layer before consuming timestep ``t``.

    ``potential`` holds the pre-reset value U_t produced by the step that
    created this state; it is what membrane capture records.
    """

    u: Tensor
    t: int = 0
    steps: Optional[int] = None
    potential: Optional[Tensor] = None

    @classmethod
    def initial(cls, shape: Sequence[int], steps: Optional[int] = None) -> 'MembraneState':
        return cls(Tensor(np.zeros(tuple(shape))), 0, steps)

    def advance(self, u: Tensor, potential: Tensor) -> 'MembraneState':
        return MembraneState(u, self.t + 1, self.steps, potential)


def _check_step(state: MembraneState, x_t: Tensor):
    if state.u.shape != x_t.shape:
        raise ShapeMismatchError(f'Membrane shape {state.u.shape} != input shape {x_t.shape}')
    if state.steps is not None and state.t >= state.steps:
        raise GraphStateError(f'Timestep {state.t} is beyond temporal depth {state.steps}')


def check_spike_range(spikes: Tensor, p: NeuronParams):
    if p.surrogate.relaxed:
        return
    if p.kind == 'I-LIF':
        allowed = np.arange(p.d_max + 1)
    elif p.kind in ('SignedIF', 'SignedIF+LIF'):
        allowed = np.array([-1, 0, 1])
    else:
        allowed = np.array([0, 1])
    if not np.all(np.isin(spikes.data, allowed)):
        raise SpikeRangeError(f'{p.kind} emitted spikes outside {allowed.tolist()}')


def lif_step(state: MembraneState, x_t: Tensor, p: NeuronParams) -> Tuple[MembraneState, Tensor]:
    _check_step(state, x_t)
    charged = add(scale(state.u, p.beta), x_t)
    spikes = spike_threshold(charged, p.v_th, p.surrogate)
    # hard reset: fired neurons drop to 0
    reset = sub(charged, mul(charged, spikes))
    return state.advance(reset, charged), spikes


def ilif_step(state: MembraneState, x_t: Tensor, p: NeuronParams) -> Tuple[MembraneState, Tensor]:
    """Integer-level spikes: level = clamp(floor(u'/v_th), 0, d_max)."""
    if p.kind != 'I-LIF':
        raise ConfigurationError(f'ilif_step needs an I-LIF neuron, got {p.kind}')
    _check_step(state, x_t)
    charged = add(scale(state.u, p.beta), x_t)
    level = spike_threshold(charged, p.v_th, p.surrogate, inclusive=True)
    for k in range(2, p.d_max + 1):
        level = add(level, spike_threshold(charged, k * p.v_th, p.surrogate, inclusive=True))
    residual = sub(charged, scale(level, p.v_th))
    return state.advance(residual, charged), level


def signed_if_step(state: MembraneState, x_t: Tensor, p: NeuronParams) -> Tuple[MembraneState, Tensor]:
    if p.kind not in ('SignedIF', 'SignedIF+LIF'):
        raise ConfigurationError(f'signed_if_step needs a SignedIF neuron, got {p.kind}')
    _check_step(state, x_t)
    # integrate-and-fire: no leak
    charged = add(state.u, x_t)
    positive = spike_threshold(charged, p.v_th, p.surrogate)
    negative = spike_threshold(scale(charged, -1.0), p.v_th, p.surrogate)
    spikes = sub(positive, negative)
    reset = sub(charged, mul(charged, add(positive, negative)))
    return state.advance(reset, charged), spikes


class SpikingNeuron():
    """Unrolls one neuron population over T timesteps."""

    def __init__(self, params: NeuronParams):
        self._params = params

    @property
    def params(self) -> NeuronParams:
        return self._params

    def step(self, state: MembraneState, x_t: Tensor) -> Tuple[MembraneState, Tensor]:
        stepper = getattr(self, substrate_mapping.neuron_step_mapping[self._params.kind])
        new_state, spikes = stepper(state, x_t)
        check_spike_range(spikes, self._params)
        return new_state, spikes

    def run(self, currents: Sequence[Tensor], capture: bool = False) -> Tuple[List[Tensor], List[Tensor]]:
        state = MembraneState.initial(currents[0].shape, len(currents))
        spikes, trace = [], []
        for current in currents:
            state, output = self.step(state, current)
            spikes.append(output)
            if capture:
                trace.append(state.potential)
        return spikes, trace

    ################################################################################
    #                          NEURON DYNAMICS DISPATCH                            #
    ################################################################################

    def _step_lif(self, state: MembraneState, x_t: Tensor):
        return lif_step(state, x_t, self._params)

    def _step_ilif(self, state: MembraneState, x_t: Tensor):
        return ilif_step(state, x_t, self._params)

    def _step_signed_if(self, state: MembraneState, x_t: Tensor):
        return signed_if_step(state, x_t, self._params)
