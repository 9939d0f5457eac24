# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from typing import Sequence, Tuple
from ..numeric import Tensor


class Adam():
    def __init__(self, params: Sequence[Tensor], lr: float = 1e-3,
                 betas: Tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self._params = list(params)
        self.lr = lr
        self._betas = betas
        self._eps = eps
        self._step = 0
        self._exp_avg = [np.zeros_like(param.data, dtype=np.float64) for param in self._params]
        self._exp_avg_sq = [np.zeros_like(param.data, dtype=np.float64) for param in self._params]

    def zero_grad(self):
        for param in self._params:
            param.zero_grad()

    def step(self):
        beta1, beta2 = self._betas
        self._step += 1
        bias_correction1 = 1 - beta1 ** self._step
        bias_correction2 = 1 - beta2 ** self._step
        for param, exp_avg, exp_avg_sq in zip(self._params, self._exp_avg, self._exp_avg_sq):
            if param.grad is None:
                continue
            grad = param.grad.astype(np.float64)
            exp_avg *= beta1
            exp_avg += (1 - beta1) * grad
            exp_avg_sq *= beta2
            exp_avg_sq += (1 - beta2) * np.square(grad)
            denom = np.sqrt(exp_avg_sq / bias_correction2) + self._eps
            update = (self.lr / bias_correction1) * exp_avg / denom
            param.data = (param.data - update).astype(param.data.dtype)
