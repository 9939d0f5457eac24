# -*- coding: utf-8 -*-
#!/usr/bin/env python3


class QualityCorruptionError(Exception):
    pass


class ShapeMismatchError(QualityCorruptionError):
    pass


class NonFiniteError(QualityCorruptionError):
    pass


class GraphStateError(QualityCorruptionError):
    pass


class ConfigurationError(QualityCorruptionError):
    pass


class UndefinedMetricError(QualityCorruptionError):
    pass


class UnknownMethodError(QualityCorruptionError):
    pass


class DivergenceError(QualityCorruptionError):
    def __init__(self, message: str, history: list):
        super().__init__(message)
        self.history = history


class TransferContractError(QualityCorruptionError):
    pass


class SchemaError(QualityCorruptionError):
    def __init__(self, message: str, record_index: int = -1):
        if record_index >= 0:
            message = f'Record {record_index}: {message}'
        super().__init__(message)
        self.record_index = record_index


class InputRangeError(QualityCorruptionError):
    pass


class SpikeRangeError(QualityCorruptionError):
    pass


class GeometryError(QualityCorruptionError):
    pass
