# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import io
import numpy as np
from dataclasses import dataclass, field
from PIL import Image
from scipy import fft, ndimage
from typing import Dict, List
from . import purification_mapping
from ..exceptions import InputRangeError, UnknownMethodError


@dataclass(frozen=True)
class PurifyMethod():
    domain: str
    name: str
    params: Dict[str, float] = field(default_factory=dict)


def catalog() -> List[PurifyMethod]:
    return [
        PurifyMethod(domain, name, dict(params))
        for name, (domain, _, params) in purification_mapping.purification_catalog.items()
        if name != 'identity'
    ]


class Purifier():
    """Input purification applied to CHW (or NCHW) images in [0, 1]."""

    def __init__(self, name: str):
        if name not in purification_mapping.purification_catalog:
            raise UnknownMethodError(f'Unknown purification method: {name}')
        domain, method, params = purification_mapping.purification_catalog[name]
        self._method = PurifyMethod(domain, name, dict(params))
        self._transform = getattr(self, method)

    @property
    def method(self) -> PurifyMethod:
        return self._method

    @property
    def name(self) -> str:
        return self._method.name

    def __call__(self, images: np.ndarray) -> np.ndarray:
        images = np.asarray(images)
        if images.size and (images.min() < 0 or images.max() > 1):
            raise InputRangeError('Purification expects pixel values in [0, 1].')
        if images.ndim == 3:
            return self._purify(images)
        return np.stack([self._purify(image) for image in images]) if len(images) else images.copy()

    def _purify(self, image: np.ndarray) -> np.ndarray:
        purified = self._transform(image.astype(np.float64), **self._method.params)
        return np.clip(purified, 0.0, 1.0).astype(image.dtype)

    ################################################################################
    #                              FREQUENCY DOMAIN                                #
    ################################################################################

    @staticmethod
    def _dct_lowpass(image: np.ndarray, keep: int, block: int) -> np.ndarray:
        channels, height, width = image.shape
        pad_h, pad_w = (-height) % block, (-width) % block
        padded = np.pad(image, ((0, 0), (0, pad_h), (0, pad_w)), mode='edge')
        rows, cols = padded.shape[1] // block, padded.shape[2] // block
        blocks = padded.reshape(channels, rows, block, cols, block).transpose(0, 1, 3, 2, 4)
        coefficients = fft.dctn(blocks, axes=(-2, -1), norm='ortho')
        mask = np.zeros((block, block))
        mask[:keep, :keep] = 1.0
        restored = fft.idctn(coefficients * mask, axes=(-2, -1), norm='ortho')
        restored = restored.transpose(0, 1, 3, 2, 4).reshape(padded.shape)
        return restored[:, :height, :width]

    @staticmethod
    def _jpeg(image: np.ndarray, quality: int) -> np.ndarray:
        pixels = np.round(np.transpose(image, (1, 2, 0)) * 255).astype(np.uint8)
        buffer = io.BytesIO()
        Image.fromarray(pixels).save(buffer, format='JPEG', quality=int(quality))
        buffer.seek(0)
        decoded = np.asarray(Image.open(buffer).convert('RGB'), dtype=np.float64) / 255.0
        return np.transpose(decoded, (2, 0, 1))

    ################################################################################
    #                               SPATIAL DOMAIN                                 #
    ################################################################################

    @staticmethod
    def _gaussian(image: np.ndarray, sigma: float) -> np.ndarray:
        return ndimage.gaussian_filter(image, sigma=(0, sigma, sigma))

    @staticmethod
    def _mean(image: np.ndarray, size: int) -> np.ndarray:
        return ndimage.uniform_filter(image, size=(1, size, size))

    @staticmethod
    def _median(image: np.ndarray, size: int) -> np.ndarray:
        return ndimage.median_filter(image, size=(1, size, size))

    ################################################################################
    #                                VALUE DOMAIN                                  #
    ################################################################################

    @staticmethod
    def _bit_depth(image: np.ndarray, bits: int) -> np.ndarray:
        if bits >= 8:
            return image
        levels = 2 ** bits - 1
        return np.round(image * levels) / levels


def purify(image: np.ndarray, method: str) -> np.ndarray:
    return Purifier(method)(image)
