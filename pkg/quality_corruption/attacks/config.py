# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union
from . import attack_mapping
from ..exceptions import ConfigurationError, SchemaError
from ..hashing import ConfigMixin
from ..serialization import read_flat_binary, write_flat_binary


@dataclass(frozen=True)
class AttackConfig(ConfigMixin):
    """Fully determines one perturbation run.

    ``eps`` is in 1/255 units for linf and in [0, 1]-pixel L2 norm for l2.
    ``step_size`` is in the same units; None selects the method default.
    ``fmp_lambda`` left as None resolves to the FMP default for ``method='fmp'``
    and to 0 otherwise.
    """

    norm: str = 'linf'
    eps: float = 8.0
    steps: int = 10
    step_size: Optional[float] = None
    loss: str = 'det_sum'
    fmp_lambda: Optional[float] = None
    method: str = 'pgd'
    seed: int = 0
    random_start: bool = False
    momentum: float = attack_mapping.APGD_MOMENTUM
    step_halving: bool = True

    def __post_init__(self):
        if self.fmp_lambda is None:
            default = attack_mapping.FMP_LAMBDA if self.method == 'fmp' else 0.0
            object.__setattr__(self, 'fmp_lambda', default)
        if self.norm not in attack_mapping.norms:
            raise ConfigurationError(f'Unknown norm: {self.norm}')
        if not self.eps > 0:
            raise ConfigurationError(f'Budget must be positive, got {self.eps}')
        if self.steps < 1:
            raise ConfigurationError(f'Step count must be >= 1, got {self.steps}')
        if self.step_size is not None and self.step_size < 0:
            raise ConfigurationError(f'Step size must be non-negative, got {self.step_size}')
        if self.loss not in attack_mapping.loss_mapping:
            raise ConfigurationError(f'Unknown attack loss: {self.loss}')
        if self.fmp_lambda < 0:
            raise ConfigurationError(f'FMP weight must be non-negative, got {self.fmp_lambda}')
        if (self.method, self.norm) not in attack_mapping.method_mapping:
            raise ConfigurationError(f'Unknown attack method {self.method} for norm {self.norm}')
        if not 0 <= self.momentum < 1:
            raise ConfigurationError(f'Momentum must lie in [0, 1), got {self.momentum}')

    @property
    def radius(self) -> float:
        return self.eps * attack_mapping.eps_units[self.norm]

    @property
    def alpha(self) -> float:
        if self.step_size is not None:
            return self.step_size * attack_mapping.eps_units[self.norm]
        return self.radius * attack_mapping.default_step_fraction[self.method]

    @property
    def label(self) -> str:
        if self.method == 'fmp' or self.fmp_lambda > 0:
            return f'fmp{self.fmp_lambda:g}/{self.loss}'
        if self.method == 'apgd':
            return f'apgd/{self.loss}'
        return self.loss

    def descriptor(self) -> dict:
        return {'norm': self.norm, 'eps': self.eps, 'steps': self.steps, 'loss': self.label}

    @classmethod
    def from_dict(cls, values: dict) -> 'AttackConfig':
        return cls(**values)


def project(delta: np.ndarray, image: np.ndarray, norm: str, radius: float) -> np.ndarray:
    """Project onto the budget ball, then onto the pixel box [0, 1] around ``image``."""
    if norm == 'linf':
        delta = np.clip(delta, -radius, radius)
    else:
        norm_value = np.linalg.norm(delta)
        if norm_value > radius:
            delta = delta * (radius / norm_value)
    return np.clip(delta, -image, 1.0 - image)


@dataclass
class Perturbation():
    delta: np.ndarray
    crafted_on: str
    config: AttackConfig
    image_id: int = 0
    loss_history: List[float] = field(default_factory=list)
    membrane_history: List[float] = field(default_factory=list)

    def apply(self, image: np.ndarray) -> np.ndarray:
        if tuple(image.shape) != tuple(self.delta.shape):
            raise ConfigurationError(f'Perturbation shape {self.delta.shape} != image shape {image.shape}')
        adversarial = np.clip(np.asarray(image, dtype=np.float64) + self.delta, 0.0, 1.0)
        return adversarial.astype(image.dtype)

    def norm(self) -> float:
        if self.config.norm == 'linf':
            return float(np.max(np.abs(self.delta))) if self.delta.size else 0.0
        return float(np.linalg.norm(self.delta))

    def save(self, path: Union[str, Path]) -> Path:
        header = {
            'format': attack_mapping.perturbation_magic,
            'crafted_on': self.crafted_on,
            'config': self.config.to_plain(),
            'config_hash': self.config.config_hash(),
            'seed': self.config.seed,
            'image_id': self.image_id,
            'loss_history': [float(value) for value in self.loss_history],
            'membrane_history': [float(value) for value in self.membrane_history]
        }
        return write_flat_binary(path, header, [self.delta], dtype=np.float64)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Perturbation':
        header, arrays = read_flat_binary(path)
        if header.get('format') != attack_mapping.perturbation_magic or len(arrays) != 1:
            raise SchemaError(f'{path} is not a perturbation file')
        return cls(
            delta=arrays[0],
            crafted_on=header['crafted_on'],
            config=AttackConfig.from_dict(header['config']),
            image_id=header.get('image_id', 0),
            loss_history=header.get('loss_history', []),
            membrane_history=header.get('membrane_history', [])
        )
