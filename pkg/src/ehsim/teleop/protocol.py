"""Fixed-length binary wire protocol for the teleoperation link.

Every message is exactly 28 bytes, little-endian, no inter-frame
delimiter (fixed-length framing):

    offset  size  field
    0       1     magic, 0xA7
    1       1     msg_type (0x01 MASTER_POS, 0x02 SLAVE_STATE,
                  0x03 HELLO, 0x04 SHUTDOWN)
    2       2     seq, uint16
    4       8     timestamp_us, uint64
    12      8     payload_a, IEEE-754 double
    20      8     payload_b, IEEE-754 double

MASTER_POS carries (pinch displacement mm, master local force N);
SLAVE_STATE carries (gripper displacement mm, gripper load-cell force N).
Payloads must be finite.  Each malformed-input case raises its own error
type so peers can distinguish framing faults from data faults.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass

from ..errors import FrameLengthError, FrameMagicError, FramePayloadError, FrameTypeError

MAGIC = 0xA7
FRAME_SIZE = 28

_LAYOUT = struct.Struct("<BBHQdd")
assert _LAYOUT.size == FRAME_SIZE


class MsgType(enum.IntEnum):
    MASTER_POS = 0x01
    SLAVE_STATE = 0x02
    HELLO = 0x03
    SHUTDOWN = 0x04


@dataclass(frozen=True)
class TeleopFrame:
    """One wire message; see module docstring for payload semantics."""

    msg_type: MsgType
    seq: int = 0
    timestamp_us: int = 0
    payload_a: float = 0.0
    payload_b: float = 0.0


def encode_frame(frame: TeleopFrame) -> bytes:
    """Serialize a frame to its 28-byte wire form."""
    try:
        msg_type = MsgType(frame.msg_type)
    except ValueError:
        raise FrameTypeError(f"invalid msg_type {frame.msg_type!r}") from None
    if not (isinstance(frame.seq, int) and 0 <= frame.seq <= 0xFFFF):
        raise FramePayloadError(f"seq must be a uint16, got {frame.seq!r}")
    if not (isinstance(frame.timestamp_us, int) and 0 <= frame.timestamp_us < 1 << 64):
        raise FramePayloadError(f"timestamp_us must be a uint64, got {frame.timestamp_us!r}")
    if not (math.isfinite(frame.payload_a) and math.isfinite(frame.payload_b)):
        raise FramePayloadError(
            f"payloads must be finite, got ({frame.payload_a!r}, {frame.payload_b!r})"
        )
    return _LAYOUT.pack(
        MAGIC,
        int(msg_type),
        frame.seq,
        frame.timestamp_us,
        frame.payload_a,
        frame.payload_b,
    )


def decode_frame(data: bytes) -> TeleopFrame:
    """Parse 28 wire bytes back into a frame (inverse of encode_frame)."""
    if len(data) != FRAME_SIZE:
        raise FrameLengthError(f"frame must be exactly {FRAME_SIZE} bytes, got {len(data)}")
    magic, raw_type, seq, timestamp_us, payload_a, payload_b = _LAYOUT.unpack(data)
    if magic != MAGIC:
        raise FrameMagicError(f"bad magic byte 0x{magic:02x}, expected 0x{MAGIC:02x}")
    try:
        msg_type = MsgType(raw_type)
    except ValueError:
        raise FrameTypeError(f"unknown msg_type 0x{raw_type:02x}") from None
    if not (math.isfinite(payload_a) and math.isfinite(payload_b)):
        raise FramePayloadError(f"non-finite payload in frame: ({payload_a!r}, {payload_b!r})")
    return TeleopFrame(
        msg_type=msg_type,
        seq=seq,
        timestamp_us=timestamp_us,
        payload_a=payload_a,
        payload_b=payload_b,
    )
