# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import numpy as np
from dataclasses import dataclass, field
from typing import Callable, List
from ..exceptions import ShapeMismatchError
from .tensor import CompGraph, Tensor

logger = logging.getLogger(__name__)


@dataclass
class GradientCheckResult():
    coordinates: List[int] = field(default_factory=list)
    analytic: List[float] = field(default_factory=list)
    numeric: List[float] = field(default_factory=list)
    relative_errors: List[float] = field(default_factory=list)
    excluded: List[int] = field(default_factory=list)

    @property
    def max_relative_error(self) -> float:
        return max(self.relative_errors) if self.relative_errors else 0.0


def _same_regions(reference: list, candidate: list) -> bool:
    if len(reference) != len(candidate):
        return False
    return all(np.array_equal(a, b) for a, b in zip(reference, candidate))


def _evaluate(fn: Callable[[Tensor], Tensor], x: np.ndarray):
    graph = CompGraph(fn)
    output = graph.forward(Tensor(x))
    return float(np.asarray(output.data).reshape(())), graph.regions()


def check_gradient(fn: Callable[[Tensor], Tensor], x: np.ndarray, n_coords: int = 20,
                   step: float = 1e-6, seed: int = 0, floor: float = 1e-6,
                   max_attempts: int = 2000) -> GradientCheckResult:
    """Compare reverse-mode gradients against central finite differences.

    Coordinates whose +/- step moves any non-smooth op onto another piece
    (relu kink, surrogate support edge, clamp bound, argmax switch) are
    excluded and reported separately.
    """
    graph = CompGraph(fn)
    output = graph.forward(Tensor(x, requires_grad=True))
    if np.asarray(output.data).size != 1:
        raise ShapeMismatchError(f'Gradient check needs a scalar function, got shape {output.shape}.')
    base_regions = graph.regions()
    analytic = graph.backward()[0].reshape(-1)
    result = GradientCheckResult()
    rng = np.random.default_rng(seed)
    flat = np.asarray(x, dtype=np.float64).reshape(-1)
    for attempt, index in enumerate(rng.permutation(flat.size)):
        if len(result.coordinates) == n_coords or attempt >= max_attempts:
            break
        plus, minus = flat.copy(), flat.copy()
        plus[index] += step
        minus[index] -= step
        f_plus, regions_plus = _evaluate(fn, plus.reshape(x.shape))
        f_minus, regions_minus = _evaluate(fn, minus.reshape(x.shape))
        if not (_same_regions(base_regions, regions_plus) and _same_regions(base_regions, regions_minus)):
            result.excluded.append(int(index))
            continue
        numeric = (f_plus - f_minus) / (2 * step)
        exact = float(analytic[index])
        result.coordinates.append(int(index))
        result.analytic.append(exact)
        result.numeric.append(numeric)
        result.relative_errors.append(abs(exact - numeric) / max(abs(exact), abs(numeric), floor))
    if result.excluded:
        logger.debug('Gradient check excluded %d coordinates near non-smooth points.', len(result.excluded))
    return result
