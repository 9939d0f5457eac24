#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from scipy.special import logit

norms = ('linf', 'l2')

# loss selector -> AttackObjective method
loss_mapping = {
    'det_sum': '_det_sum_loss',
    'cw_margin': '_cw_margin_loss'
}

# attack method -> module-level function name
method_mapping = {
    ('pgd', 'linf'): 'pgd',
    ('pgd', 'l2'): 'pgd_l2',
    ('apgd', 'linf'): 'apgd',
    ('apgd', 'l2'): 'apgd',
    ('fmp', 'linf'): 'fmp',
    ('fmp', 'l2'): 'fmp'
}

# linf budgets are given in 1/255 pixel units
eps_units = {
    'linf': 1.0 / 255.0,
    'l2': 1.0
}

# default step size as a multiple of the budget
default_step_fraction = {
    'pgd': 0.25,
    'fmp': 0.25,
    'apgd': 2.0
}

CW_TAU = float(logit(0.25))
CW_KAPPA = 0.0
FMP_LAMBDA = 0.5
# weight of the fresh gradient step; the previous displacement carries the rest
APGD_STEP_WEIGHT = 0.75
APGD_MOMENTUM = 1.0 - APGD_STEP_WEIGHT
APGD_RHO = 0.75

# checkpoint schedule as fractions of the step count
APGD_FIRST_CHECKPOINT = 0.22
APGD_MIN_WINDOW = 0.06
APGD_WINDOW_DECREASE = 0.03

# attack-strength trend and budget ladder defaults
TREND_STEPS = (10, 20, 50, 100)
LADDER_EPS = (2.0, 4.0, 8.0)

perturbation_magic = 'quality-corruption-perturbation'
