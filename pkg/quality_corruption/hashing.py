# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import hashlib
import json
from dataclasses import asdict, fields, is_dataclass


def _canonical(value):
    if is_dataclass(value):
        return {field.name: _canonical(getattr(value, field.name)) for field in fields(value)}
    if isinstance(value, dict):
        return {str(key): _canonical(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(item) for item in value]
    return value


class ConfigMixin():
    """Canonical dict / hash helpers shared by the frozen config dataclasses."""

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(_canonical(self), sort_keys=True, separators=(',', ':'))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()

    def to_plain(self) -> dict:
        return json.loads(self.canonical_json())
