"""Region-of-interest extraction, wrist removal, and binary resizing."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NoForeground, NoQualifyingRows
from .raster import BinFrame


class Orientation(Enum):
    ARM_FROM_LEFT = "left"
    ARM_FROM_RIGHT = "right"
    ARM_FROM_TOP = "top"
    ARM_FROM_BOTTOM = "bottom"


@dataclass(frozen=True)
class RoiBox:
    min_row: int
    max_row: int
    min_col: int
    max_col: int


def column_histogram(bin: BinFrame) -> np.ndarray:
    """Per-column count of foreground pixels (length = width)."""
    return bin.bits.sum(axis=0, dtype=np.int64)


def row_histogram(bin: BinFrame) -> np.ndarray:
    """Per-row count of foreground pixels (length = height)."""
    return bin.bits.sum(axis=1, dtype=np.int64)


def find_roi(bin: BinFrame) -> RoiBox:
    """Locate the box whose boundary rows/columns clear the 1% noise offsets.

    Offsets are floor(dim / 100), clamped to at least 1.  Scanning moves
    inward from each side until the row/column 1-count strictly exceeds
    its offset.
    """
    if bin.count_ones() == 0:
        raise NoForeground("no foreground pixels")
    hor_offset = max(1, bin.width // 100)
    ver_offset = max(1, bin.height // 100)
    rows = row_histogram(bin)
    cols = column_histogram(bin)
    row_ok = np.nonzero(rows > ver_offset)[0]
    col_ok = np.nonzero(cols > hor_offset)[0]
    if row_ok.size == 0 or col_ok.size == 0:
        raise NoQualifyingRows("no row/column exceeds its noise offset")
    return RoiBox(int(row_ok[0]), int(row_ok[-1]), int(col_ok[0]), int(col_ok[-1]))


def crop_roi(bin: BinFrame) -> BinFrame:
    """Crop to the noise-rejecting region of interest."""
    box = find_roi(bin)
    return BinFrame(bin.bits[box.min_row : box.max_row + 1, box.min_col : box.max_col + 1])


def _wrist_crop_left(bin: BinFrame) -> BinFrame:
    """Canonical wrist crop with the arm entering from the left edge."""
    h = column_histogram(bin)
    # palm column: argmax, ties toward the column farthest from the arm side
    global_max_col = int(bin.width - 1 - np.argmax(h[::-1]))
    # wrist column: argmin strictly between the arm edge and the palm,
    # ties toward the arm side
    if global_max_col <= 1:
        return bin
    search = h[1:global_max_col]
    if int(search.min()) == int(search.max()):
        return bin
    cropping_point = 1 + int(np.argmin(search))
    return crop_roi(BinFrame(bin.bits[:, cropping_point:]))


def wrist_crop(bin: BinFrame, orient: Orientation = Orientation.ARM_FROM_LEFT) -> BinFrame:
    """Remove the arm/wrist side of an ROI-cropped silhouette.

    The cut falls on the histogram minimum between the arm-side edge and
    the histogram maximum (the palm); the wrist column itself is kept.
    Non-left orientations run the same procedure under reflection or
    transposition.
    """
    if orient is Orientation.ARM_FROM_LEFT:
        return _wrist_crop_left(bin)
    if orient is Orientation.ARM_FROM_RIGHT:
        out = _wrist_crop_left(BinFrame(bin.bits[:, ::-1]))
        return BinFrame(out.bits[:, ::-1])
    if orient is Orientation.ARM_FROM_TOP:
        out = _wrist_crop_left(BinFrame(bin.bits.T))
        return BinFrame(out.bits.T)
    # ARM_FROM_BOTTOM: transpose puts rows on the column axis with the arm
    # at high indices, so reflect as well
    out = _wrist_crop_left(BinFrame(bin.bits.T[:, ::-1]))
    return BinFrame(out.bits[:, ::-1].T)


def resize_binary(bin: BinFrame, out_w: int, out_h: int) -> BinFrame:
    """Nearest-neighbor resize: output (r, c) samples the input at
    (floor((r+0.5)*in_h/out_h), floor((c+0.5)*in_w/out_w))."""
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be >= 1")
    # integer-exact pixel-center mapping
    src_r = (2 * np.arange(out_h) + 1) * bin.height // (2 * out_h)
    src_c = (2 * np.arange(out_w) + 1) * bin.width // (2 * out_w)
    return BinFrame(bin.bits[np.ix_(src_r, src_c)])
