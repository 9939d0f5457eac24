# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
from pathlib import Path
from typing import Optional, Union
from . import detector_mapping
from .config import DetectorConfig
from .model import SpikingModel, build_detector
from ..exceptions import SchemaError
from ..serialization import read_flat_binary, write_flat_binary
from ..substrate import classify_substrate

logger = logging.getLogger(__name__)


def save_checkpoint(model: SpikingModel, path: Union[str, Path], seed: Optional[int] = None) -> Path:
    config = model.config
    header = {
        'format': detector_mapping.checkpoint_magic,
        'model_id': model.model_id,
        'config': config.to_plain(),
        'config_hash': config.config_hash(),
        'substrate': config.substrate.to_plain(),
        'deployability': classify_substrate(config.substrate).value,
        'seed': config.seed if seed is None else seed
    }
    path = write_flat_binary(path, header, model.state_arrays())
    logger.info('Saved checkpoint of %s to %s', model.model_id, path)
    return path


def load_checkpoint(path: Union[str, Path]) -> SpikingModel:
    header, arrays = read_flat_binary(path)
    if header.get('format') != detector_mapping.checkpoint_magic:
        raise SchemaError(f'{path} is not a detector checkpoint')
    config = DetectorConfig.from_dict(header['config'])
    if config.config_hash() != header.get('config_hash'):
        logger.warning('Checkpoint %s config hash differs from its recorded value', path)
    model = build_detector(config, header.get('model_id'))
    model.load_state_arrays(arrays)
    return model
