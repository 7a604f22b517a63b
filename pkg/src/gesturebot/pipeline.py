"""End-to-end orchestration: frames in, robot commands and log records out.

The stage chain is preprocess -> binarize -> motion gate, then on every
gate fire: ROI crop -> wrist crop -> resize -> classify -> map -> actuate.
Per-frame stage failures are logged and skipped; they never halt the
stream or emit a command.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from . import eigengesture
from .command_map import MappingTable, map_gesture
from .eigengesture import Classification, EigenModel
from .errors import GestureBotError
from .motion_gate import GateConfig, GateState, gate_step
from .raster import BinFrame, GrayFrame, ThresholdMethod, binarize, decode_pgm, preprocess
from .robot_sim import Outcome, RobotState, World, apply_command
from .segmenter import Orientation, crop_roi, resize_binary, wrist_crop


@dataclass(frozen=True)
class Ports:
    frames: int = 9101
    commands: int = 9102
    state: int = 9103
    gateway: int = 9104


@dataclass(frozen=True)
class PipelineConfig:
    frame_period_ms: int = 200
    threshold: ThresholdMethod = field(default_factory=ThresholdMethod.otsu)
    gate: GateConfig = field(default_factory=GateConfig)
    orientation: Orientation = Orientation.ARM_FROM_LEFT
    template_geometry: tuple[int, int] = (eigengesture.TEMPLATE_WIDTH, eigengesture.TEMPLATE_HEIGHT)
    k_max: int = 20
    tau_override: float | None = None
    mapping_path: str | None = None
    world_path: str | None = None
    log_path: str | None = None
    ports: Ports = field(default_factory=Ports)

    def __post_init__(self):
        if self.frame_period_ms < 1:
            raise ValueError("frame_period_ms must be >= 1")


CONFIG_ENV_VAR = "GESTUREBOT_CONFIG"


def config_from_json(text: str) -> PipelineConfig:
    """Build a PipelineConfig from its JSON file form; absent keys keep
    their defaults."""
    doc = json.loads(text)
    kwargs = {}
    for key in ("frame_period_ms", "k_max", "tau_override",
                "mapping_path", "world_path", "log_path"):
        if key in doc:
            kwargs[key] = doc[key]
    if "threshold" in doc:
        t = doc["threshold"]
        if t.get("method") == "fixed":
            kwargs["threshold"] = ThresholdMethod.fixed(int(t["level"]))
        else:
            kwargs["threshold"] = ThresholdMethod.otsu()
    if "gate" in doc:
        kwargs["gate"] = GateConfig(**doc["gate"])
    if "orientation" in doc:
        kwargs["orientation"] = Orientation(doc["orientation"])
    if "template_geometry" in doc:
        kwargs["template_geometry"] = tuple(doc["template_geometry"])
    if "ports" in doc:
        kwargs["ports"] = Ports(**doc["ports"])
    return PipelineConfig(**kwargs)


def segment_gesture(
    bin: BinFrame, orientation: Orientation, geometry: tuple[int, int]
) -> BinFrame:
    """ROI crop, wrist crop, and resize to the template geometry."""
    roi = crop_roi(bin)
    hand = wrist_crop(roi, orientation)
    return resize_binary(hand, geometry[0], geometry[1])


def classify_frame(
    model: EigenModel,
    bin: BinFrame,
    orientation: Orientation = Orientation.ARM_FROM_LEFT,
    frame_seq: int = 0,
) -> Classification:
    """Full segmenter + classifier path on one gated binary frame."""
    hand = segment_gesture(bin, orientation, model.geometry)
    return eigengesture.classify(model, hand, frame_seq=frame_seq)


def command_record(
    c: Classification, verb: str, magnitude: float, outcome: Outcome, pose: RobotState
) -> dict:
    return {
        "frame_seq": c.frame_seq,
        "label": c.label,
        "distance": c.distance,
        "verb": verb,
        "magnitude": magnitude,
        "outcome": outcome.value,
        "pose": {
            "x": pose.x,
            "y": pose.y,
            "theta": pose.theta,
            "grip": pose.grip,
            "tick": pose.tick,
        },
    }


def dump_log(records: list[dict]) -> str:
    """JSON Lines rendering; stable key order for byte-exact comparisons."""
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def run_pipeline_bin(
    source: Iterable[tuple[int, BinFrame]],
    cfg: PipelineConfig,
    model: EigenModel,
    table: MappingTable,
    world: World,
    state: RobotState,
    on_classify: Callable[[Classification], None] | None = None,
    on_state: Callable[[RobotState], None] | None = None,
) -> tuple[list[dict], RobotState]:
    """Run the gate-onward pipeline over (seq, binary frame) pairs."""
    records: list[dict] = []
    gate = GateState()
    for seq, bin_frame in source:
        gate, fired = gate_step(gate, cfg.gate, bin_frame)
        if fired is None:
            continue
        try:
            c = classify_frame(model, fired, cfg.orientation, frame_seq=seq)
        except GestureBotError as e:
            records.append({"frame_seq": seq, "error": f"{type(e).__name__}: {e}"})
            continue
        cmd = map_gesture(table, c)
        state, outcome = apply_command(world, state, cmd)
        if on_classify is not None:
            on_classify(c)
        if on_state is not None:
            on_state(state)
        records.append(command_record(c, cmd.verb.value, cmd.magnitude, outcome, state))
    return records, state


def binarized_stream(
    source: Iterable[GrayFrame], cfg: PipelineConfig
) -> Iterator[tuple[int, BinFrame]]:
    for frame in source:
        yield frame.seq, binarize(preprocess(frame), cfg.threshold)


def run_pipeline(
    source: Iterable[GrayFrame],
    cfg: PipelineConfig,
    model: EigenModel,
    table: MappingTable,
    world: World,
    state: RobotState,
    **callbacks,
) -> tuple[list[dict], RobotState]:
    """Run the full local pipeline over grayscale frames."""
    return run_pipeline_bin(binarized_stream(source, cfg), cfg, model, table, world, state, **callbacks)


def frame_dir_source(directory: str | Path) -> Iterator[GrayFrame]:
    """Yield frames from numbered PGM files (frame_%06d.pgm order)."""
    paths = sorted(Path(directory).glob("*.pgm"))
    for i, path in enumerate(paths):
        frame = decode_pgm(path.read_bytes())
        yield GrayFrame(frame.pixels, seq=i)


def evaluate(
    model: EigenModel,
    probes: Iterable[tuple[int, BinFrame]],
    orientation: Orientation = Orientation.ARM_FROM_LEFT,
) -> dict:
    """Accuracy of the full segmenter + classifier path over labeled probes."""
    n = 0
    correct = 0
    unknown = 0
    for label, probe in probes:
        n += 1
        try:
            c = classify_frame(model, probe, orientation)
        except GestureBotError:
            unknown += 1
            continue
        if c.label is None:
            unknown += 1
        elif c.label == label:
            correct += 1
    return {"accuracy": correct / n if n else 0.0, "n": n, "unknown": unknown}
