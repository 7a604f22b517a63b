"""Motionless-frame detection over a rolling three-frame window.

A triple (frame1, frame2, frame3) is "still" when the 1-count of
(frame1 XOR frame3) OR (frame2 XOR frame3) falls below a configured
fraction of the pixel count.  After enough consecutive still triples the
gate emits the newest frame as the completed gesture, then stays quiet
until motion resumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .raster import BinFrame


@dataclass(frozen=True)
class GateConfig:
    still_ratio: float = 0.01
    required_run: int = 3

    def __post_init__(self):
        if not (0.0 < self.still_ratio < 1.0):
            raise ValueError("still_ratio must be in (0, 1)")
        if self.required_run < 1:
            raise ValueError("required_run must be >= 1")


@dataclass
class GateState:
    window: list[BinFrame] = field(default_factory=list)
    still_run: int = 0
    armed: bool = True


def mismatch_ratio(frame1: BinFrame, frame2: BinFrame, frame3: BinFrame) -> float:
    """Fraction of pixels set in (frame1 XOR frame3) OR (frame2 XOR frame3)."""
    shape = frame1.bits.shape
    if frame2.bits.shape != shape or frame3.bits.shape != shape:
        raise DimensionMismatch("gate frames must share dimensions")
    mm = (frame1.bits ^ frame3.bits) | (frame2.bits ^ frame3.bits)
    return int(np.count_nonzero(mm)) / mm.size


def gate_step(
    state: GateState, cfg: GateConfig, frame: BinFrame
) -> tuple[GateState, BinFrame | None]:
    """Advance the gate by one frame; returns (new state, fired frame or None).

    The fired frame is the newest frame of the triple that completed the
    required run of still triples.  After firing the gate disarms until a
    moving triple re-arms it, so a held pose yields exactly one emission.
    """
    if state.window and frame.bits.shape != state.window[0].bits.shape:
        raise DimensionMismatch("frame does not match window dimensions")
    window = (state.window + [frame])[-3:]
    still_run = state.still_run
    armed = state.armed
    fired = None
    if len(window) == 3:
        ratio = mismatch_ratio(window[0], window[1], window[2])
        if ratio < cfg.still_ratio:
            still_run += 1
            if armed and still_run >= cfg.required_run:
                fired = frame
                armed = False
        else:
            still_run = 0
            armed = True
    return GateState(window, still_run, armed), fired
