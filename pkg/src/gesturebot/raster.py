"""Raster types, PGM/PBM codecs, preprocessing and global thresholding.

Frames are numpy-backed: ``GrayFrame.pixels`` is an (h, w) uint8 array,
``BinFrame.bits`` is an (h, w) uint8 array of 0/1 with 1 = foreground.
All operations here are pure; frames are treated as immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    MalformedHeader,
    TruncatedPayload,
    UnsupportedMaxval,
)

MAX_DIM = 4096


class ThresholdKind(Enum):
    OTSU_GLOBAL = "otsu"
    FIXED = "fixed"


@dataclass(frozen=True)
class ThresholdMethod:
    kind: ThresholdKind = ThresholdKind.OTSU_GLOBAL
    level: int = 128  # only meaningful for FIXED

    def __post_init__(self):
        if self.kind is ThresholdKind.FIXED and not (0 <= self.level <= 255):
            raise ValueError("fixed threshold level must be in 0..255")

    @staticmethod
    def otsu() -> "ThresholdMethod":
        return ThresholdMethod(ThresholdKind.OTSU_GLOBAL)

    @staticmethod
    def fixed(level: int) -> "ThresholdMethod":
        return ThresholdMethod(ThresholdKind.FIXED, level)


def _check_dims(width: int, height: int):
    if width < 1 or height < 1:
        raise ValueError("frame dimensions must be >= 1")
    if width > MAX_DIM or height > MAX_DIM:
        raise ValueError(f"frame dimensions must be <= {MAX_DIM}")


@dataclass(frozen=True)
class GrayFrame:
    pixels: np.ndarray  # (h, w) uint8
    seq: int = 0

    def __post_init__(self):
        px = np.ascontiguousarray(np.asarray(self.pixels, dtype=np.uint8))
        if px.ndim != 2:
            raise ValueError("pixels must be a 2-D array")
        _check_dims(px.shape[1], px.shape[0])
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinFrame:
    bits: np.ndarray  # (h, w) uint8, values 0/1

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.bits, dtype=np.uint8))
        if b.ndim != 2:
            raise ValueError("bits must be a 2-D array")
        _check_dims(b.shape[1], b.shape[0])
        if not np.all(b <= 1):
            raise ValueError("bits must be 0 or 1")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def count_ones(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinFrame)
            and self.bits.shape == other.bits.shape
            and bool(np.array_equal(self.bits, other.bits))
        )

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))


# ---------------------------------------------------------------------------
# PGM / PBM codecs
# ---------------------------------------------------------------------------

def _parse_netpbm_tokens(data: bytes, n_tokens: int) -> tuple[list[bytes], int]:
    """Read whitespace/comment-separated header tokens; return (tokens, offset
    of the byte right after the single whitespace terminating the last one)."""
    tokens = []
    i = 0
    while len(tokens) < n_tokens:
        # skip whitespace and comments
        while i < len(data):
            c = data[i : i + 1]
            if c.isspace():
                i += 1
            elif c == b"#":
                while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                    i += 1
            else:
                break
        if i >= len(data):
            raise MalformedHeader("unexpected end of header")
        start = i
        while i < len(data) and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        tokens.append(data[start:i])
        if len(tokens) == n_tokens:
            # exactly one whitespace byte separates header from raw payload
            if i < len(data) and data[i : i + 1].isspace():
                i += 1
    return tokens, i


def _int_token(tok: bytes, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MalformedHeader(f"bad {what}: {tok!r}") from None


def decode_pgm(data: bytes) -> GrayFrame:
    """Decode a binary (P5) or ASCII (P2) portable graymap, maxval <= 255."""
    if len(data) < 2:
        raise MalformedHeader("too short")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise MalformedHeader(f"bad magic {magic!r}")
    tokens, off = _parse_netpbm_tokens(data[2:], 3)
    width = _int_token(tokens[0], "width")
    height = _int_token(tokens[1], "height")
    maxval = _int_token(tokens[2], "maxval")
    if width < 1 or height < 1 or width > MAX_DIM or height > MAX_DIM:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    if maxval < 1:
        raise MalformedHeader(f"bad maxval {maxval}")
    if maxval > 255:
        raise UnsupportedMaxval(f"maxval {maxval} > 255")
    body = data[2 + off :]
    n = width * height
    if magic == b"P5":
        if len(body) < n:
            raise TruncatedPayload(f"need {n} bytes, have {len(body)}")
        px = np.frombuffer(body[:n], dtype=np.uint8).reshape(height, width)
    else:
        vals = body.split()
        if len(vals) < n:
            raise TruncatedPayload(f"need {n} samples, have {len(vals)}")
        try:
            arr = np.array([int(v) for v in vals[:n]], dtype=np.int64)
        except ValueError:
            raise MalformedHeader("non-numeric P2 sample") from None
        if arr.min() < 0 or arr.max() > maxval:
            raise MalformedHeader("P2 sample out of range")
        px = arr.astype(np.uint8).reshape(height, width)
    return GrayFrame(px)


def encode_pgm(frame: GrayFrame) -> bytes:
    """Encode as binary P5, maxval 255."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack an (h, w) 0/1 array row-major, MSB first, rows padded to bytes."""
    return np.packbits(bits, axis=1).tobytes()


def unpack_bits(data: bytes, width: int, height: int) -> np.ndarray:
    """Inverse of pack_bits; raises TruncatedPayload if data is short."""
    row_bytes = (width + 7) // 8
    need = row_bytes * height
    if len(data) < need:
        raise TruncatedPayload(f"need {need} bytes, have {len(data)}")
    rows = np.frombuffer(data[:need], dtype=np.uint8).reshape(height, row_bytes)
    return np.unpackbits(rows, axis=1)[:, :width]


def encode_pbm(bin: BinFrame) -> bytes:
    """Encode as binary P4; file bit 1 = foreground, MSB-first, rows padded."""
    header = f"P4\n{bin.width} {bin.height}\n".encode("ascii")
    return header + pack_bits(bin.bits)


def decode_pbm(data: bytes) -> BinFrame:
    """Decode a binary (P4) or ASCII (P1) portable bitmap."""
    if len(data) < 2:
        raise MalformedHeader("too short")
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise MalformedHeader(f"bad magic {magic!r}")
    tokens, off = _parse_netpbm_tokens(data[2:], 2)
    width = _int_token(tokens[0], "width")
    height = _int_token(tokens[1], "height")
    if width < 1 or height < 1 or width > MAX_DIM or height > MAX_DIM:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    body = data[2 + off :]
    if magic == b"P4":
        bits = unpack_bits(body, width, height)
    else:
        digits = [c for c in body if c in (0x30, 0x31)]
        n = width * height
        if len(digits) < n:
            raise TruncatedPayload(f"need {n} bits, have {len(digits)}")
        bits = (np.array(digits[:n], dtype=np.uint8) - 0x30).reshape(height, width)
    return BinFrame(bits)


# ---------------------------------------------------------------------------
# Preprocessing and thresholding
# ---------------------------------------------------------------------------

def box_smooth(frame: GrayFrame) -> GrayFrame:
    """3x3 box filter: integer mean (floor division by 9), edges replicated."""
    padded = np.pad(frame.pixels.astype(np.uint32), 1, mode="edge")
    h, w = frame.pixels.shape
    acc = np.zeros((h, w), dtype=np.uint32)
    for dr in range(3):
        for dc in range(3):
            acc += padded[dr : dr + h, dc : dc + w]
    return GrayFrame((acc // 9).astype(np.uint8), seq=frame.seq)


def contrast_stretch(frame: GrayFrame) -> GrayFrame:
    """Linear stretch mapping [min, max] -> [0, 255] with floor rounding.

    A constant image is returned unchanged.
    """
    lo = int(frame.pixels.min())
    hi = int(frame.pixels.max())
    if lo == hi:
        return frame
    stretched = (frame.pixels.astype(np.uint32) - lo) * 255 // (hi - lo)
    return GrayFrame(stretched.astype(np.uint8), seq=frame.seq)


def preprocess(frame: GrayFrame) -> GrayFrame:
    """Smoothing followed by normalization (box filter, then stretch)."""
    return contrast_stretch(box_smooth(frame))


def otsu_threshold(pixels: np.ndarray) -> int:
    """Threshold maximizing between-class variance over the 256-bin histogram.

    Classes are {<= T} and {> T}; ties break toward the smallest T.
    Returns -1 for a single-intensity image (no valid split).
    """
    hist = np.bincount(pixels.ravel(), minlength=256).astype(np.float64)
    total = pixels.size
    w0 = np.cumsum(hist)  # pixels <= T, for T = 0..255
    w1 = total - w0
    cum = np.cumsum(hist * np.arange(256))
    total_sum = cum[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = cum / w0
        mu1 = (total_sum - cum) / w1
        bcv = w0 * w1 * (mu0 - mu1) ** 2
    bcv = np.where((w0 == 0) | (w1 == 0), -1.0, bcv)
    best = int(np.argmax(bcv))  # argmax takes the first (smallest) maximizer
    if bcv[best] <= 0:
        return -1
    return best


def binarize(frame: GrayFrame, method: ThresholdMethod | None = None) -> BinFrame:
    """Foreground bit = 1 iff intensity is strictly above the threshold.

    Under Otsu a uniform image binarizes to all background, so the motion
    gate can run on blank startup frames.
    """
    if method is None:
        method = ThresholdMethod.otsu()
    if method.kind is ThresholdKind.OTSU_GLOBAL:
        t = otsu_threshold(frame.pixels)
        if t < 0:
            return BinFrame(np.zeros_like(frame.pixels))
    else:
        t = method.level
    return BinFrame((frame.pixels > t).astype(np.uint8))
