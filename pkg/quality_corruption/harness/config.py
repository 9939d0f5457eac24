# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import yaml
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union
from ..attacks import AttackConfig
from ..defenses import ATConfig, VerdictThresholds, catalog
from ..detector import DetectorConfig, TrainingHyper
from ..exceptions import ConfigurationError, UnknownMethodError
from ..hashing import ConfigMixin
from ..metrics import CountMonitorConfig, FailureModeThresholds


def _build(cls, values: Optional[dict], kind: str):
    if values is None:
        return cls()
    if not isinstance(values, dict):
        raise ConfigurationError(f'{kind} configuration must be a mapping, got {type(values).__name__}')
    try:
        return cls.from_dict(values) if hasattr(cls, 'from_dict') else cls(**values)
    except TypeError as error:
        raise ConfigurationError(f'Invalid {kind} configuration: {error}') from error


def detector_config_from_dict(values: Optional[dict]) -> DetectorConfig:
    return _build(DetectorConfig, values, 'detector')


def attack_config_from_dict(values: Optional[dict]) -> AttackConfig:
    return _build(AttackConfig, values, 'attack')


@dataclass(frozen=True)
class ModelEntry(ConfigMixin):
    model_id: str
    config: DetectorConfig = field(default_factory=DetectorConfig)
    checkpoint: Optional[str] = None

    @classmethod
    def from_dict(cls, values: dict) -> 'ModelEntry':
        values = dict(values)
        try:
            model_id = values.pop('id')
        except KeyError:
            raise ConfigurationError('Every model entry needs an "id"')
        config = detector_config_from_dict(values.pop('config', None))
        checkpoint = values.pop('checkpoint', None)
        if values:
            raise ConfigurationError(f'Unknown model entry fields: {sorted(values)}')
        return cls(model_id, config, checkpoint)


@dataclass(frozen=True)
class SweepConfig(ConfigMixin):
    """Models x attacks (x defenses) evaluated on one dataset."""

    models: Tuple[ModelEntry, ...]
    attacks: Tuple[AttackConfig, ...]
    dataset: str
    output: str = 'reports'
    defenses: Tuple[str, ...] = ()
    trend_steps: Tuple[int, ...] = ()
    subset: Optional[int] = None
    subset_by_id: bool = True
    train_dataset: Optional[str] = None
    training: Optional[TrainingHyper] = None
    thresholds: FailureModeThresholds = field(default_factory=FailureModeThresholds)
    verdict: VerdictThresholds = field(default_factory=VerdictThresholds)
    monitor: CountMonitorConfig = field(default_factory=CountMonitorConfig)
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.models:
            raise ConfigurationError('A sweep needs at least one model.')
        if not self.attacks:
            raise ConfigurationError('A sweep needs at least one attack.')
        identifiers = [entry.model_id for entry in self.models]
        if len(set(identifiers)) != len(identifiers):
            raise ConfigurationError(f'Model ids must be unique, got {identifiers}')
        known = {method.name for method in catalog()}
        for name in self.defenses:
            if name not in known:
                raise UnknownMethodError(f'Unknown purification method: {name}')
        if self.subset is not None and self.subset < 1:
            raise ConfigurationError(f'Subset size must be >= 1, got {self.subset}')
        if any(steps < 1 for steps in self.trend_steps):
            raise ConfigurationError(f'Trend step counts must be >= 1, got {list(self.trend_steps)}')
        if self.workers < 1:
            raise ConfigurationError(f'Worker count must be >= 1, got {self.workers}')

    @classmethod
    def from_dict(cls, values: dict) -> 'SweepConfig':
        values = dict(values)
        for key in ('models', 'attacks', 'dataset'):
            if key not in values:
                raise ConfigurationError(f'Sweep configuration misses "{key}"')
        values['models'] = tuple(ModelEntry.from_dict(entry) for entry in values['models'] or ())
        values['attacks'] = tuple(attack_config_from_dict(entry) for entry in values['attacks'] or ())
        values['defenses'] = tuple(values.get('defenses') or ())
        values['trend_steps'] = tuple(int(steps) for steps in values.get('trend_steps') or ())
        if values.get('training') is not None:
            values['training'] = _build(TrainingHyper, values['training'], 'training')
        for key, kind in (('thresholds', FailureModeThresholds), ('verdict', VerdictThresholds),
                          ('monitor', CountMonitorConfig)):
            if key in values:
                values[key] = _build(kind, values[key], key)
        try:
            return cls(**values)
        except TypeError as error:
            raise ConfigurationError(f'Invalid sweep configuration: {error}') from error

    def with_overrides(self, **overrides) -> 'SweepConfig':
        """Copy with the non-None overrides applied (CLI flags win over the file)."""
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return SweepConfig(**values)


def load_yaml(path: Union[str, Path]) -> dict:
    with open(path, 'rt', encoding='utf-8') as f:
        content = yaml.safe_load(f)
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigurationError(f'{path} must contain a YAML mapping')
    return content


def load_sweep_config(path: Union[str, Path]) -> SweepConfig:
    return SweepConfig.from_dict(load_yaml(path))


def at_config_from_dict(values: Optional[dict]) -> ATConfig:
    values = dict(values or {})
    if 'attack' in values:
        values['attack'] = attack_config_from_dict(values['attack'])
    return _build(ATConfig, values, 'adversarial training')
