"""Bilateral teleoperation: wire protocol, channel model, session machines."""

from .protocol import (
    FRAME_SIZE,
    MAGIC,
    MsgType,
    TeleopFrame,
    decode_frame,
    encode_frame,
)
from .session import (
    Channel,
    ChannelParams,
    MasterDevice,
    PinchScript,
    SessionConfig,
    SlaveGripper,
    SlaveParams,
    VirtualObject,
    run_session,
)

__all__ = [
    "FRAME_SIZE",
    "MAGIC",
    "MsgType",
    "TeleopFrame",
    "decode_frame",
    "encode_frame",
    "Channel",
    "ChannelParams",
    "MasterDevice",
    "PinchScript",
    "SessionConfig",
    "SlaveGripper",
    "SlaveParams",
    "VirtualObject",
    "run_session",
]
