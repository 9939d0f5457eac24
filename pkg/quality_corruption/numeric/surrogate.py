# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass, replace
from ..exceptions import ConfigurationError

SURROGATE_KINDS = ('rectangular', 'arctan')


@dataclass(frozen=True)
class SurrogateSpec():
    """Pseudo-derivative of the spike threshold.

    Both kinds peak at 1/width on the threshold and integrate to one, so the
    relaxed forward (the primitive of the pseudo-derivative) goes from 0 to 1
    like the hard spike it replaces.
    """

    kind: str = 'rectangular'
    width: float = 1.0
    relaxed: bool = False

    def __post_init__(self):
        if self.kind not in SURROGATE_KINDS:
            raise ConfigurationError(f'Unknown surrogate kind: {self.kind}')
        if not self.width > 0:
            raise ConfigurationError(f'Surrogate width must be positive, got {self.width}')

    def derivative(self, distance: np.ndarray) -> np.ndarray:
        if self.kind == 'rectangular':
            inside = np.abs(distance) <= self.width / 2
            return inside.astype(distance.dtype) / distance.dtype.type(self.width)
        scaled = np.pi * distance / self.width
        return (1.0 / (self.width * (1.0 + np.square(scaled)))).astype(distance.dtype)

    def primitive(self, distance: np.ndarray) -> np.ndarray:
        if self.kind == 'rectangular':
            return np.clip(distance / self.width + 0.5, 0.0, 1.0)
        return 0.5 + np.arctan(np.pi * distance / self.width) / np.pi

    def piece(self, distance: np.ndarray) -> np.ndarray:
        if self.kind == 'rectangular':
            half = self.width / 2
            return np.where(distance < -half, -1, np.where(distance > half, 1, 0)).astype(np.int8)
        return np.zeros(distance.shape, dtype=np.int8)

    def as_relaxed(self, relaxed: bool = True) -> 'SurrogateSpec':
        return replace(self, relaxed=relaxed)
