from .config import AttackConfig, Perturbation, project
from .gradient import apgd, fmp, pgd, pgd_l2
from .losses import AttackObjective, cw_margin_loss, det_sum_loss, membrane_disruption
from .runner import (
    AttackOutcome, apply_perturbations, attack_image, attack_images, budget_sweep, evaluate_attack,
    random_noise_control, strength_trend, transfer
)
