from .auditor import AuditReport, audit
from .coco import (
    AnnotationSet, AuditInputs, CategoryIndex, DetectionDumpParser, detection_records, load_annotations,
    load_coco, protocol_from_detections, write_detection_dump, write_protocol_dump
)
from .config import (
    ModelEntry, SweepConfig, at_config_from_dict, attack_config_from_dict, detector_config_from_dict,
    load_sweep_config, load_yaml
)
from .report import ReportWriter, emit_report, read_report, render_table
from .shapes import ShapesDatasetConfig, ShapesGenerator, generate_shapes, load_dataset, read_image, split_dataset
from .sweep import SweepResult, SweepRunner, run_sweep, select_subset
