# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from typing import Callable
from . import attack_mapping
from .config import AttackConfig, Perturbation, project
from .losses import AttackObjective
from ..detector import SpikingModel
from ..exceptions import ConfigurationError, ShapeMismatchError

logger = logging.getLogger(__name__)

StepRule = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


def _sign_step(delta: np.ndarray, grad: np.ndarray, alpha: float) -> np.ndarray:
    return delta - alpha * np.sign(grad.astype(np.float64))


def _l2_step(delta: np.ndarray, grad: np.ndarray, alpha: float) -> np.ndarray:
    grad = grad.astype(np.float64)
    norm = np.linalg.norm(grad)
    if norm == 0:
        logger.debug('Zero gradient, L2 step skipped')
        return delta
    return delta - alpha * grad / norm


_step_rules = {
    'linf': _sign_step,
    'l2': _l2_step
}


def _check_image(model: SpikingModel, image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    if tuple(image.shape) != model.input_shape:
        raise ShapeMismatchError(f'Model expects an image of shape {model.input_shape}, got {image.shape}')
    return image


def _initial_delta(image: np.ndarray, cfg: AttackConfig, image_id: int) -> np.ndarray:
    if not cfg.random_start:
        return np.zeros(image.shape, dtype=np.float64)
    rng = np.random.default_rng([cfg.seed, image_id])
    if cfg.norm == 'linf':
        delta = rng.uniform(-cfg.radius, cfg.radius, size=image.shape)
    else:
        direction = rng.normal(size=image.shape)
        delta = direction / np.linalg.norm(direction) * cfg.radius * rng.uniform()
    return project(delta, image.astype(np.float64), cfg.norm, cfg.radius)


def _adversarial(image: np.ndarray, delta: np.ndarray) -> np.ndarray:
    return np.clip(image.astype(np.float64) + delta, 0.0, 1.0).astype(image.dtype)


def _momentum_update(delta: np.ndarray, candidate: np.ndarray, previous: np.ndarray, momentum: float) -> np.ndarray:
    """Blend the fresh step with the previous displacement; ``momentum`` weights the latter."""
    return delta + (1.0 - momentum) * (candidate - delta) + momentum * (delta - previous)


def _projected_descent(model: SpikingModel, image: np.ndarray, cfg: AttackConfig, image_id: int) -> Perturbation:
    image = _check_image(model, image)
    clean = image.astype(np.float64)
    step = _step_rules[cfg.norm]
    objective = AttackObjective(model, cfg, image)
    delta = _initial_delta(image, cfg, image_id)
    history = []
    for _ in range(cfg.steps):
        loss, grad = objective.gradient(_adversarial(image, delta))
        history.append(loss)
        delta = project(step(delta, grad, cfg.alpha), clean, cfg.norm, cfg.radius)
    history.append(objective.value(_adversarial(image, delta)))
    return Perturbation(delta, model.model_id, cfg, image_id, history, objective.membrane_history)


def pgd(model: SpikingModel, image: np.ndarray, cfg: AttackConfig, image_id: int = 0) -> Perturbation:
    """Sign-gradient descent on the attack loss inside the linf ball."""
    if cfg.norm != 'linf':
        raise ConfigurationError(f'pgd is the linf attack, got norm {cfg.norm}')
    return _projected_descent(model, image, cfg, image_id)


def pgd_l2(model: SpikingModel, image: np.ndarray, cfg: AttackConfig, image_id: int = 0) -> Perturbation:
    """Normalised-gradient descent inside the L2 ball; zero gradients skip the step."""
    if cfg.norm != 'l2':
        raise ConfigurationError(f'pgd_l2 is the L2 attack, got norm {cfg.norm}')
    return _projected_descent(model, image, cfg, image_id)


def fmp(model: SpikingModel, image: np.ndarray, cfg: AttackConfig, image_id: int = 0) -> Perturbation:
    """PGD on L_det - lambda * mean membrane MSE against the clean membrane trace.

    With lambda = 0, or a model without spiking layers, this is exactly PGD.
    """
    return _projected_descent(model, image, cfg, image_id)


def apgd(model: SpikingModel, image: np.ndarray, cfg: AttackConfig, image_id: int = 0) -> Perturbation:
    """Simplified APGD: momentum, checkpointed step halving and restart from the best point.

    ``cfg.momentum`` weights the previous displacement and the fresh gradient
    step gets the remaining ``1 - momentum`` (0.75 by default). With momentum 0
    and halving disabled the iterates are those of PGD with the same step size.
    Returns the lowest-loss perturbation seen.
    """
    image = _check_image(model, image)
    clean = image.astype(np.float64)
    step = _step_rules[cfg.norm]
    objective = AttackObjective(model, cfg, image)
    steps = cfg.steps
    alpha = cfg.alpha
    window = max(int(attack_mapping.APGD_FIRST_CHECKPOINT * steps), 1)
    min_window = max(int(attack_mapping.APGD_MIN_WINDOW * steps), 1)
    decrease = max(int(attack_mapping.APGD_WINDOW_DECREASE * steps), 1)

    delta = _initial_delta(image, cfg, image_id)
    previous = delta
    loss, grad = objective.gradient(_adversarial(image, delta))
    history = [loss]
    best_delta, best_loss, best_grad = delta, loss, grad
    best_at_last_check = best_loss
    reduced_last_check = True
    since_check, improved = 0, 0
    for index in range(steps):
        candidate = project(step(delta, grad, alpha), clean, cfg.norm, cfg.radius)
        if cfg.momentum and index > 0:
            candidate = project(_momentum_update(delta, candidate, previous, cfg.momentum),
                                clean, cfg.norm, cfg.radius)
        previous, delta = delta, candidate
        if index == steps - 1:
            loss = objective.value(_adversarial(image, delta))
        else:
            loss, grad = objective.gradient(_adversarial(image, delta))
        if loss < history[-1]:
            improved += 1
        history.append(loss)
        if loss < best_loss:
            best_delta, best_loss, best_grad = delta, loss, grad
        since_check += 1
        if not cfg.step_halving or since_check < window or index == steps - 1:
            continue
        oscillating = improved <= window * attack_mapping.APGD_RHO
        stalled = not reduced_last_check and best_at_last_check <= best_loss
        reduced_last_check = oscillating or stalled
        best_at_last_check = best_loss
        if reduced_last_check:
            alpha /= 2.0
            delta, grad, previous = best_delta, best_grad, best_delta
            logger.debug('APGD step %d: step size halved to %.3g', index, alpha)
        window = max(window - decrease, min_window)
        since_check, improved = 0, 0
    return Perturbation(best_delta, model.model_id, cfg, image_id, history, objective.membrane_history)
