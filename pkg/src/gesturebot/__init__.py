"""Gesture-driven robot teleoperation stack.

Pipeline stages: grayscale preprocessing and thresholding (raster),
motionless-frame detection (motion_gate), silhouette segmentation
(segmenter), eigengesture classification (eigengesture), command mapping
(command_map), a simulated robot (robot_sim), a UDP wire protocol (wire),
orchestration (pipeline, cli), and an operator console gateway (gateway).
"""

from .command_map import MappingTable, RobotCommand, Verb, default_table, load_mapping, map_gesture
from .eigengesture import Classification, EigenModel, GestureTemplate, classify, project, train
from .motion_gate import GateConfig, GateState, gate_step, mismatch_ratio
from .pipeline import PipelineConfig, evaluate, run_pipeline
from .raster import (
    BinFrame,
    GrayFrame,
    ThresholdMethod,
    binarize,
    decode_pbm,
    decode_pgm,
    encode_pbm,
    encode_pgm,
    preprocess,
)
from .robot_sim import Outcome, RobotState, World, apply_command, empty_arena, render_view
from .segmenter import Orientation, column_histogram, crop_roi, resize_binary, wrist_crop
from .synth import SyntheticSpec, gen_dataset
from .wire import ReassemblyBuffer, chunk_frame, decode_packet, encode_packet

__version__ = "0.1.0"
