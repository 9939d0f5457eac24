from .deployability import Deployability, SubstrateSpec, classify_substrate, reference_substrates
from .encoding import InputEncoder, encode_input
from .neurons import (
    MembraneState, NeuronParams, SpikingNeuron, check_spike_range, ilif_step, lif_step,
    signed_if_step
)
