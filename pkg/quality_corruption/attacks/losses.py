# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from typing import List, Optional, Tuple
from . import attack_mapping
from .config import AttackConfig
from ..detector import MembraneTrace, RawHeadOutput, SpikingModel, infer
from ..numeric import Tensor, add, clamp, mse, reduce_sum, scale, sigmoid, sub

logger = logging.getLogger(__name__)


def det_sum_loss(raw: RawHeadOutput) -> Tensor:
    """Sum of objectness confidences over every output cell; attacks minimise it."""
    return reduce_sum(sigmoid(raw.objectness()))


def cw_margin_loss(raw: RawHeadOutput, tau: float = attack_mapping.CW_TAU,
                   kappa: float = attack_mapping.CW_KAPPA) -> Tensor:
    """Sum over cells of max(z_obj - tau, -kappa)."""
    margin = sub(raw.objectness(), Tensor(np.asarray(tau)))
    return reduce_sum(clamp(margin, low=-kappa))


def membrane_disruption(trace: MembraneTrace, clean: List[np.ndarray]) -> Tensor:
    """Mean over spiking layers of the element- and timestep-averaged membrane MSE."""
    per_layer = []
    for layer, reference in zip(trace.layers, clean):
        steps = [mse(potential, Tensor(reference[t])) for t, potential in enumerate(layer)]
        total = steps[0]
        for step in steps[1:]:
            total = add(total, step)
        per_layer.append(scale(total, 1.0 / len(steps)))
    total = per_layer[0]
    for value in per_layer[1:]:
        total = add(total, value)
    return scale(total, 1.0 / len(per_layer))


class AttackObjective():
    """Loss minimised by the gradient attacks, with the optional membrane term."""

    def __init__(self, model: SpikingModel, cfg: AttackConfig, image: np.ndarray):
        self._model = model
        self._cfg = cfg
        self._detection_loss = getattr(self, attack_mapping.loss_mapping[cfg.loss])
        self._clean_trace: Optional[List[np.ndarray]] = None
        self.membrane_history: List[float] = []
        if cfg.fmp_lambda > 0:
            if model.spiking_layer_count == 0:
                logger.warning('FMP on %s: no spiking layers, running plain PGD', model.model_id)
            else:
                _, trace = infer(model, image, capture=True)
                self._clean_trace = trace.arrays()

    @property
    def uses_membrane(self) -> bool:
        return self._clean_trace is not None

    def _det_sum_loss(self, raw: RawHeadOutput) -> Tensor:
        return det_sum_loss(raw)

    def _cw_margin_loss(self, raw: RawHeadOutput) -> Tensor:
        return cw_margin_loss(raw)

    def __call__(self, raw: RawHeadOutput, trace: Optional[MembraneTrace]) -> Tensor:
        loss = self._detection_loss(raw)
        if not self.uses_membrane:
            return loss
        disruption = membrane_disruption(trace, self._clean_trace)
        self.membrane_history.append(disruption.item())
        return sub(loss, scale(disruption, self._cfg.fmp_lambda))

    def gradient(self, image: np.ndarray) -> Tuple[float, np.ndarray]:
        return self._model.input_gradient(image, self, capture=self.uses_membrane)

    def value(self, image: np.ndarray) -> float:
        raw, trace = infer(self._model, image, capture=self.uses_membrane)
        return self(raw, trace).item()
