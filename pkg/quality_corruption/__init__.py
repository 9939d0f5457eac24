__version__ = '0.1.0'
from .exceptions import *
from .quality_corruption import (
    attack_checkpoint, audit_dumps, convert_report, defend, generate_dataset, sweep, train_detector
)
