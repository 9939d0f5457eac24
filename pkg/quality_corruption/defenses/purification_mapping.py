#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# name -> (signal domain, Purifier method, parameters)
purification_catalog = {
    'dct_lowpass_6': ('frequency', '_dct_lowpass', {'keep': 6, 'block': 8}),
    'dct_lowpass_4': ('frequency', '_dct_lowpass', {'keep': 4, 'block': 8}),
    'jpeg_50': ('frequency', '_jpeg', {'quality': 50}),
    'gaussian_0.5': ('spatial-linear', '_gaussian', {'sigma': 0.5}),
    'gaussian_1.0': ('spatial-linear', '_gaussian', {'sigma': 1.0}),
    'mean_3x3': ('spatial-linear', '_mean', {'size': 3}),
    'median_3x3': ('spatial-nonlinear', '_median', {'size': 3}),
    'median_5x5': ('spatial-nonlinear', '_median', {'size': 5}),
    'bit_depth_4': ('value', '_bit_depth', {'bits': 4}),
    'bit_depth_6': ('value', '_bit_depth', {'bits': 6}),
    'identity': ('value', '_bit_depth', {'bits': 8})
}

signal_domains = ('frequency', 'spatial-linear', 'spatial-nonlinear', 'value')

verdict_labels = {
    'restored': 'accuracy restored',
    'shifted': 'mode shifted',
    'none': 'no effect'
}

# Five-component robustness framework: component -> behaviour expected where count and accuracy couple
framework_expectations = {
    'DRR metric': 'DRR proportional to mAP drop',
    'Count monitoring': 'Count drops -> alarm',
    'Input purification': 'Reduces severity; mAP recovers',
    'Adversarial training': 'Accuracy-robustness trade-off',
    'eps-certification': 'Strongest attack bounds worst case'
}

# Learning rates swept by adversarial training
at_learning_rates = (1e-4, 5e-5, 1e-5, 5e-6, 1e-6)
