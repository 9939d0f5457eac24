#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Per-cell head channel layout: objectness, centre offsets, log-sizes, class logits
OBJECTNESS = (0, 1)
OFFSETS = (1, 3)
LOG_SIZES = (3, 5)
CLASS_START = 5

# Activation of the non-spiking twin
ann_activation_mapping = {
    'relu': '_relu_activation',
    'threshold': '_threshold_activation'
}

# Forward pass per model family
forward_mapping = {
    True: '_ann_forward',
    False: '_spiking_forward'
}

# Prior objectness probability used to initialise the head bias
OBJECTNESS_PRIOR = 0.01
LOG_SIZE_CLIP = 8.0

checkpoint_magic = 'quality-corruption-checkpoint'
