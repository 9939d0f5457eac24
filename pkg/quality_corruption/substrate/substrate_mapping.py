#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Constraint (i) status implied by each spike encoding
encoding_binary_constraint = {
    'binary01': 'yes',
    'integer0toD': 'no',
    'ternary': 'conditional'
}

neuron_kinds = ('LIF', 'I-LIF', 'SignedIF')
substrate_neuron_kinds = neuron_kinds + ('SignedIF+LIF',)

# neuron kind -> SpikingNeuron method
neuron_step_mapping = {
    'LIF': '_step_lif',
    'I-LIF': '_step_ilif',
    'SignedIF': '_step_signed_if',
    'SignedIF+LIF': '_step_signed_if'
}

# neuron kind -> encoding emitted by its spikes
neuron_encoding_mapping = {
    'LIF': 'binary01',
    'I-LIF': 'integer0toD',
    'SignedIF': 'ternary',
    'SignedIF+LIF': 'ternary'
}

input_encoding_mapping = {
    'direct': '_encode_direct'
}

# Published spiking detectors and their substrate at evaluation time
reference_detectors = {
    'EMS-YOLO': {
        'ann_reference': 'YOLOv3-tiny',
        'encoding': 'binary01',
        'neuron': 'LIF',
        'T': 5,
        'c1_binary_spikes': 'yes',
        'c2_ac_only': True,
        'c3_no_dense_matmul': True
    },
    'SpikeYOLO': {
        'ann_reference': 'YOLOv8s',
        'encoding': 'integer0toD',
        'neuron': 'I-LIF',
        'T': 4,
        'c1_binary_spikes': 'no',
        'c2_ac_only': False,
        'c3_no_dense_matmul': True
    },
    'SpikingYOLOX': {
        'ann_reference': 'YOLOX-S',
        'encoding': 'ternary',
        'neuron': 'SignedIF',
        'T': 1,
        'c1_binary_spikes': 'conditional',
        'c2_ac_only': False,
        'c3_no_dense_matmul': True
    },
    'Adv-SpikingYOLOX': {
        'ann_reference': 'YOLOX-S',
        'encoding': 'ternary',
        'neuron': 'SignedIF+LIF',
        'T': 1,
        'c1_binary_spikes': 'conditional',
        'c2_ac_only': False,
        'c3_no_dense_matmul': False
    }
}
