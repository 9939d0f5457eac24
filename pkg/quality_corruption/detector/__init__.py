from .checkpoint import load_checkpoint, save_checkpoint
from .config import DetectorConfig
from .decoding import decode_grid, decode_head
from .model import MembraneTrace, RawHeadOutput, SpikingModel, build_detector, infer
from .optim import Adam
from .protocol import ProtocolDetections, detections_from_grids, evaluate_map, run_protocol, stack_samples
from .training import EpochMetrics, TrainingHyper, build_targets, detection_loss, train, training_step
