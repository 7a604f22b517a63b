"""Bit-exact UDP datagram codec and frame chunking/reassembly.

Every packet is ``magic "GBOT" | version 0x01 | kind | seq u32 | payload
length u16 | payload`` with all integers little-endian and reals IEEE-754
binary32.  Payloads top out at 1024 bytes so a full datagram stays under
common MTUs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .command_map import RobotCommand, Verb
from .errors import (
    BadMagic,
    InconsistentGeometry,
    LengthMismatch,
    PayloadTooLarge,
    TruncatedPayload,
    UnknownKind,
    UnsupportedVersion,
)
from .raster import BinFrame, pack_bits, unpack_bits

MAGIC = b"GBOT"
VERSION = 0x01
HEADER = struct.Struct("<4sBBIH")
MAX_PAYLOAD = 1024
CHUNK_BYTES = 1000  # packed frame bytes per FrameChunk payload

KIND_FRAME_CHUNK = 0x01
KIND_CLASS = 0x02
KIND_CMD = 0x03
KIND_STATE = 0x04

_FRAME_CHUNK_HEAD = struct.Struct("<IHHHH")
_CLASS_PAYLOAD = struct.Struct("<IBf")
_CMD_PAYLOAD = struct.Struct("<Bf")
_STATE_PAYLOAD = struct.Struct("<fffBI")

UNKNOWN_LABEL = 0xFF

VERB_CODES = {
    Verb.STOP: 0,
    Verb.FORWARD: 1,
    Verb.BACKWARD: 2,
    Verb.TURN_LEFT: 3,
    Verb.TURN_RIGHT: 4,
    Verb.GRIP_TOGGLE: 5,
    Verb.NOOP: 6,
}
CODE_VERBS = {v: k for k, v in VERB_CODES.items()}


@dataclass(frozen=True)
class FrameChunkPacket:
    seq: int
    frame_id: int
    chunk_idx: int
    chunk_cnt: int
    width: int
    height: int
    bits: bytes  # packed slice, rows MSB-first


@dataclass(frozen=True)
class ClassPacket:
    seq: int
    frame_id: int
    label: int | None  # None = Unknown
    distance: float


@dataclass(frozen=True)
class CmdPacket:
    seq: int
    verb: Verb
    magnitude: float

    @staticmethod
    def from_command(cmd: RobotCommand, seq: int = 0) -> "CmdPacket":
        return CmdPacket(seq, cmd.verb, cmd.magnitude)

    def to_command(self) -> RobotCommand:
        return RobotCommand(self.verb, self.magnitude)


@dataclass(frozen=True)
class StatePacket:
    seq: int
    x: float
    y: float
    theta: float
    grip: bool
    tick: int


Packet = FrameChunkPacket | ClassPacket | CmdPacket | StatePacket


def _header(kind: int, seq: int, payload: bytes) -> bytes:
    if len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload {len(payload)} > {MAX_PAYLOAD}")
    return HEADER.pack(MAGIC, VERSION, kind, seq & 0xFFFFFFFF, len(payload)) + payload


def encode_packet(p: Packet) -> bytes:
    if isinstance(p, FrameChunkPacket):
        payload = _FRAME_CHUNK_HEAD.pack(p.frame_id, p.chunk_idx, p.chunk_cnt, p.width, p.height) + p.bits
        return _header(KIND_FRAME_CHUNK, p.seq, payload)
    if isinstance(p, ClassPacket):
        label = UNKNOWN_LABEL if p.label is None else p.label
        return _header(KIND_CLASS, p.seq, _CLASS_PAYLOAD.pack(p.frame_id, label, p.distance))
    if isinstance(p, CmdPacket):
        return _header(KIND_CMD, p.seq, _CMD_PAYLOAD.pack(VERB_CODES[p.verb], p.magnitude))
    if isinstance(p, StatePacket):
        return _header(
            KIND_STATE, p.seq, _STATE_PAYLOAD.pack(p.x, p.y, p.theta, int(p.grip), p.tick)
        )
    raise TypeError(f"not a packet: {p!r}")


def decode_packet(data: bytes) -> Packet:
    """Total decoder: inverse of encode_packet on valid encodings, a codec
    error on everything else.  Never raises anything but GestureBotError
    subclasses (WireError or TruncatedPayload) on arbitrary byte input."""
    if len(data) < HEADER.size:
        raise TruncatedPayload(f"datagram of {len(data)} bytes is shorter than the header")
    magic, version, kind, seq, plen = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"version {version:#x}")
    body = data[HEADER.size :]
    if len(body) < plen:
        raise TruncatedPayload(f"declared {plen} payload bytes, got {len(body)}")
    if len(body) > plen:
        raise LengthMismatch(f"{len(body) - plen} trailing bytes")
    if kind == KIND_FRAME_CHUNK:
        if plen < _FRAME_CHUNK_HEAD.size:
            raise LengthMismatch("frame chunk payload shorter than its fixed head")
        frame_id, chunk_idx, chunk_cnt, width, height = _FRAME_CHUNK_HEAD.unpack_from(body)
        if chunk_cnt == 0 or chunk_idx >= chunk_cnt or width == 0 or height == 0:
            raise LengthMismatch("inconsistent frame chunk fields")
        return FrameChunkPacket(
            seq, frame_id, chunk_idx, chunk_cnt, width, height, bytes(body[_FRAME_CHUNK_HEAD.size :])
        )
    if kind == KIND_CLASS:
        if plen != _CLASS_PAYLOAD.size:
            raise LengthMismatch(f"class payload must be {_CLASS_PAYLOAD.size} bytes")
        frame_id, label, distance = _CLASS_PAYLOAD.unpack(body)
        return ClassPacket(seq, frame_id, None if label == UNKNOWN_LABEL else label, distance)
    if kind == KIND_CMD:
        if plen != _CMD_PAYLOAD.size:
            raise LengthMismatch(f"cmd payload must be {_CMD_PAYLOAD.size} bytes")
        verb_code, magnitude = _CMD_PAYLOAD.unpack(body)
        if verb_code not in CODE_VERBS:
            raise UnknownKind(f"verb code {verb_code}")
        return CmdPacket(seq, CODE_VERBS[verb_code], magnitude)
    if kind == KIND_STATE:
        if plen != _STATE_PAYLOAD.size:
            raise LengthMismatch(f"state payload must be {_STATE_PAYLOAD.size} bytes")
        x, y, theta, grip, tick = _STATE_PAYLOAD.unpack(body)
        return StatePacket(seq, x, y, theta, bool(grip), tick)
    raise UnknownKind(f"kind byte {kind:#x}")


# ---------------------------------------------------------------------------
# Frame chunking and reassembly
# ---------------------------------------------------------------------------

def chunk_frame(bin: BinFrame, frame_id: int, seq_start: int = 0) -> list[FrameChunkPacket]:
    """Split the packed bits of a frame into <= 1000-byte chunk packets."""
    packed = pack_bits(bin.bits)
    cnt = max(1, -(-len(packed) // CHUNK_BYTES))
    return [
        FrameChunkPacket(
            seq=seq_start + i,
            frame_id=frame_id,
            chunk_idx=i,
            chunk_cnt=cnt,
            width=bin.width,
            height=bin.height,
            bits=packed[i * CHUNK_BYTES : (i + 1) * CHUNK_BYTES],
        )
        for i in range(cnt)
    ]


REASSEMBLY_TIMEOUT_MS = 500


@dataclass
class _PartialFrame:
    first_ms: int
    chunk_cnt: int
    width: int
    height: int
    chunks: dict[int, bytes] = field(default_factory=dict)


class ReassemblyBuffer:
    """Order-independent chunk collector; partial frames expire whole after
    500 ms and duplicates are idempotent.  The clock is injected by the
    caller so tests are deterministic."""

    def __init__(self):
        self._partial: dict[int, _PartialFrame] = {}

    def step(self, p: FrameChunkPacket, now_ms: int) -> BinFrame | None:
        expired = [
            fid for fid, pf in self._partial.items()
            if now_ms - pf.first_ms > REASSEMBLY_TIMEOUT_MS
        ]
        for fid in expired:
            del self._partial[fid]
        pf = self._partial.get(p.frame_id)
        if pf is None:
            pf = _PartialFrame(now_ms, p.chunk_cnt, p.width, p.height)
            self._partial[p.frame_id] = pf
        elif (pf.chunk_cnt, pf.width, pf.height) != (p.chunk_cnt, p.width, p.height):
            raise InconsistentGeometry(
                f"frame {p.frame_id}: chunk disagrees on geometry/count"
            )
        pf.chunks[p.chunk_idx] = p.bits
        if len(pf.chunks) < pf.chunk_cnt:
            return None
        del self._partial[p.frame_id]
        packed = b"".join(pf.chunks[i] for i in range(pf.chunk_cnt))
        return BinFrame(unpack_bits(packed, pf.width, pf.height))


def reassemble_step(
    buf: ReassemblyBuffer, p: FrameChunkPacket, now_ms: int
) -> tuple[ReassemblyBuffer, BinFrame | None]:
    """Functional wrapper over ReassemblyBuffer.step."""
    return buf, buf.step(p, now_ms)
