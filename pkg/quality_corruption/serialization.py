# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
import yaml
from pathlib import Path
from typing import List, Tuple, Union
from .exceptions import SchemaError

_HEADER_END = b'\n...\n'


def write_flat_binary(path: Union[str, Path], header: dict, arrays: List[np.ndarray],
                      dtype=np.float32) -> Path:
    """YAML header, end-of-document marker, then the arrays as one flat little-endian buffer."""
    path = Path(path)
    header = dict(header)
    header['dtype'] = np.dtype(dtype).str
    header['shapes'] = [list(array.shape) for array in arrays]
    flat = np.concatenate([np.asarray(array, dtype=dtype).reshape(-1) for array in arrays]) if arrays else np.zeros(0, dtype=dtype)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(yaml.safe_dump(header, sort_keys=True, explicit_start=True).encode('utf-8'))
        f.write(_HEADER_END[1:])
        f.write(flat.astype(np.dtype(dtype).newbyteorder('<')).tobytes())
    return path


def read_flat_binary(path: Union[str, Path]) -> Tuple[dict, List[np.ndarray]]:
    content = Path(path).read_bytes()
    position = content.find(_HEADER_END)
    if position < 0:
        raise SchemaError(f'{path} has no header terminator')
    header = yaml.safe_load(content[:position].decode('utf-8'))
    if not isinstance(header, dict) or 'shapes' not in header or 'dtype' not in header:
        raise SchemaError(f'{path} header is missing shapes or dtype')
    dtype = np.dtype(header['dtype'])
    flat = np.frombuffer(content[position + len(_HEADER_END):], dtype=dtype.newbyteorder('<'))
    arrays, offset = [], 0
    for shape in header['shapes']:
        size = int(np.prod(shape))
        if offset + size > flat.size:
            raise SchemaError(f'{path} payload is shorter than its header declares')
        arrays.append(flat[offset:offset + size].reshape(shape).astype(dtype))
        offset += size
    if offset != flat.size:
        raise SchemaError(f'{path} payload has {flat.size - offset} trailing values')
    return header, arrays
