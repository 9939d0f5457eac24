# -*- coding: utf-8 -*-
#!/usr/bin/env python3

from typing import List
from . import substrate_mapping
from ..exceptions import ConfigurationError, InputRangeError
from ..numeric import Tensor


class InputEncoder():
    def __init__(self, scheme: str = 'direct'):
        if scheme not in substrate_mapping.input_encoding_mapping:
            raise ConfigurationError(f'Unknown input encoding scheme: {scheme}')
        self._scheme = scheme

    def encode(self, image: Tensor, T: int) -> List[Tensor]:
        if T < 1:
            raise ConfigurationError(f'Temporal depth must be >= 1, got {T}')
        data = image.data
        if data.size and (data.min() < 0 or data.max() > 1):
            raise InputRangeError(f'Pixel values must lie in [0, 1], got [{data.min()}, {data.max()}]')
        return getattr(self, substrate_mapping.input_encoding_mapping[self._scheme])(image, T)

    @staticmethod
    def _encode_direct(image: Tensor, T: int) -> List[Tensor]:
        # constant current: the same node feeds every timestep
        return [image] * T


def encode_input(image: Tensor, T: int, scheme: str = 'direct') -> List[Tensor]:
    return InputEncoder(scheme).encode(image, T)
