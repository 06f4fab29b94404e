"""Bilateral teleoperation session: master device, slave gripper, channel.

Both endpoints run 1 kHz tick loops.  The master streams its pinch
displacement every tick and renders the slave's most recent load-cell
force as its own force target through the PI loop; the slave mirrors the
commanded displacement with a rate-limited, position-quantized servo and
reports the contact force of the grasped virtual object.

The in-process :class:`Channel` is a reliable, in-order byte stream with
configurable base latency and seeded uniform jitter; frames always travel
through the byte codec, so a session exercises the wire protocol end to
end.  :func:`run_session` interleaves both endpoints deterministically
(master first each tick), which makes traces bit-reproducible for a given
seed.  A two-process socket deployment of the same endpoints lives in the
CLI.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..control import ControllerState, PiGains, PlantParams, pi_step, plant_step, static_force_map
from ..errors import FrameError, GeometryError
from ..mechanism import DeviceConfig
from ..trace import SessionTrace
from .protocol import MsgType, TeleopFrame, decode_frame, encode_frame


@dataclass(frozen=True)
class VirtualObject:
    """Grasped object: no force before contact, then k*d + k3*d^3."""

    label: str
    contact_position: float        # mm
    linear_stiffness: float        # N/mm
    cubic_stiffness: float = 0.0   # N/mm^3

    def __post_init__(self):
        if self.linear_stiffness < 0 or self.cubic_stiffness < 0:
            raise GeometryError("object stiffnesses must be >= 0")

    def contact_force(self, position: float) -> float:
        depth = position - self.contact_position
        if depth <= 0.0:
            return 0.0
        return self.linear_stiffness * depth + self.cubic_stiffness * depth**3


@dataclass(frozen=True)
class SlaveParams:
    """Gripper servo limits: velocity cap, position quantum, contact threshold."""

    max_speed: float = 30.0          # mm/s
    position_step: float = 0.01      # mm
    contact_threshold: float = 0.02  # N

    def __post_init__(self):
        if self.max_speed <= 0 or self.position_step <= 0 or self.contact_threshold <= 0:
            raise GeometryError("slave parameters must all be positive")


@dataclass(frozen=True)
class ChannelParams:
    """One-way link model: fixed base latency plus seeded uniform jitter, ms."""

    base_latency: float = 0.0
    jitter: float = 0.0

    def __post_init__(self):
        if self.base_latency < 0 or self.jitter < 0:
            raise GeometryError("latency and jitter must be >= 0")


class Channel:
    """Reliable in-order delivery with latency injection.

    Arrival time is send time + base latency + U(0, jitter); in-order
    delivery is enforced by never letting an arrival precede the previous
    one.  Bytes in, bytes out.
    """

    def __init__(self, params: ChannelParams, rng: random.Random):
        self.params = params
        self._rng = rng
        self._queue: deque[tuple[float, float, bytes]] = deque()
        self._last_arrival = -math.inf

    def send(self, data: bytes, now_ms: float):
        arrival = now_ms + self.params.base_latency + self._rng.uniform(0.0, self.params.jitter)
        arrival = max(arrival, self._last_arrival)
        self._last_arrival = arrival
        self._queue.append((arrival, now_ms, data))

    def poll(self, now_ms: float) -> list[tuple[bytes, float]]:
        """All (payload, one-way latency ms) pairs that have arrived by now."""
        out = []
        while self._queue and self._queue[0][0] <= now_ms:
            arrival, sent, data = self._queue.popleft()
            out.append((data, arrival - sent))
        return out


class MasterDevice:
    """Haptic-device endpoint: displacement source and force renderer."""

    def __init__(
        self,
        dev: DeviceConfig,
        plant: PlantParams,
        gains: PiGains,
        contact_threshold: float = 0.02,
        stale_timeout_ms: float = 50.0,
    ):
        self.dev = dev
        self.plant = plant
        self.gains = gains
        self.contact_threshold = contact_threshold
        self.stale_timeout_ms = stale_timeout_ms
        self.local_force = 0.0
        self.target_force = 0.0
        self.voltage = 0.0
        self.session_active = False
        self.stale = False
        self.shutdown_received = False
        self._ctrl = ControllerState()
        self._seq = 0
        self._last_slave_rx_ms: Optional[float] = None
        self._last_latency_ms = 0.0

    def hello(self, now_ms: float) -> TeleopFrame:
        return self._stamp(MsgType.HELLO, now_ms, 0.0, 0.0)

    def _stamp(self, msg_type: MsgType, now_ms: float, a: float, b: float) -> TeleopFrame:
        frame = TeleopFrame(
            msg_type=msg_type,
            seq=self._seq & 0xFFFF,
            timestamp_us=int(round(now_ms * 1000.0)),
            payload_a=a,
            payload_b=b,
        )
        self._seq += 1
        return frame

    def tick(
        self,
        now_ms: float,
        pinch_displacement: float,
        inbound: Sequence[tuple[TeleopFrame, float]],
    ) -> TeleopFrame:
        """One 1 ms master cycle; returns the outbound MASTER_POS frame.

        ``inbound`` pairs each received frame with its measured one-way
        latency (ms).  The newest SLAVE_STATE force becomes the PI target
        when it exceeds the contact threshold; without fresh slave data
        beyond the stale timeout the last target is held and ``stale`` set.
        """
        for frame, latency in inbound:
            if frame.msg_type is MsgType.HELLO:
                self.session_active = True
            elif frame.msg_type is MsgType.SLAVE_STATE:
                slave_force = frame.payload_b
                self.target_force = slave_force if slave_force > self.contact_threshold else 0.0
                self._last_slave_rx_ms = now_ms
                self._last_latency_ms = latency
            elif frame.msg_type is MsgType.SHUTDOWN:
                self.shutdown_received = True
        self.stale = (
            self._last_slave_rx_ms is not None
            and now_ms - self._last_slave_rx_ms > self.stale_timeout_ms
        )
        error = self.target_force - self.local_force
        self.voltage, self._ctrl = pi_step(self.gains, self._ctrl, error)
        static = static_force_map(self.dev, pinch_displacement, self.voltage)
        self.local_force = plant_step(self.plant, self.local_force, static)
        return self._stamp(MsgType.MASTER_POS, now_ms, pinch_displacement, self.local_force)

    @property
    def last_latency_ms(self) -> float:
        return self._last_latency_ms


class SlaveGripper:
    """Gripper endpoint: rate-limited position mirror plus object contact."""

    def __init__(self, params: SlaveParams, obj: VirtualObject):
        self.params = params
        self.object = obj
        self.position = 0.0
        self.force = 0.0
        self.session_active = False
        self.shutdown_received = False
        self._commanded = 0.0
        self._seq = 0

    def hello(self, now_ms: float) -> TeleopFrame:
        frame = TeleopFrame(
            msg_type=MsgType.HELLO,
            seq=self._seq & 0xFFFF,
            timestamp_us=int(round(now_ms * 1000.0)),
        )
        self._seq += 1
        return frame

    def tick(
        self,
        now_ms: float,
        dt_ms: float,
        inbound: Sequence[tuple[TeleopFrame, float]],
    ) -> TeleopFrame:
        """One 1 ms slave cycle; returns the outbound SLAVE_STATE frame."""
        for frame, _ in inbound:
            if frame.msg_type is MsgType.HELLO:
                self.session_active = True
            elif frame.msg_type is MsgType.MASTER_POS:
                self._commanded = frame.payload_a
            elif frame.msg_type is MsgType.SHUTDOWN:
                self.shutdown_received = True
        max_move = self.params.max_speed * dt_ms * 1e-3
        delta = min(max(self._commanded - self.position, -max_move), max_move)
        quantum = self.params.position_step
        self.position = round((self.position + delta) / quantum) * quantum
        self.force = self.object.contact_force(self.position)
        frame = TeleopFrame(
            msg_type=MsgType.SLAVE_STATE,
            seq=self._seq & 0xFFFF,
            timestamp_us=int(round(now_ms * 1000.0)),
            payload_a=self.position,
            payload_b=self.force,
        )
        self._seq += 1
        return frame


@dataclass(frozen=True)
class PinchScript:
    """Scripted operator displacement: piecewise-linear (t_ms, mm) knots."""

    points: tuple[tuple[float, float], ...] = ((0.0, 0.0),)

    def __post_init__(self):
        times = [t for t, _ in self.points]
        if not times or any(b <= a for a, b in zip(times, times[1:])):
            raise GeometryError("script knots must have strictly increasing times")

    @classmethod
    def ramp_hold(cls, target_mm: float, ramp_ms: float) -> "PinchScript":
        return cls(points=((0.0, 0.0), (ramp_ms, target_mm)))

    def value(self, t_ms: float) -> float:
        pts = self.points
        if t_ms <= pts[0][0]:
            return pts[0][1]
        for (t0, x0), (t1, x1) in zip(pts, pts[1:]):
            if t_ms <= t1:
                return x0 + (x1 - x0) * (t_ms - t0) / (t1 - t0)
        return pts[-1][1]


@dataclass(frozen=True)
class SessionConfig:
    """Everything one deterministic session needs besides the operator script."""

    device: DeviceConfig
    plant: PlantParams
    gains: PiGains
    slave: SlaveParams
    channel: ChannelParams
    obj: VirtualObject
    stale_timeout_ms: float = 50.0
    seed: int = 0


def run_session(
    config: SessionConfig,
    operator: Union[PinchScript, Callable[[float], float]],
    duration_ms: float,
) -> SessionTrace:
    """Run master and slave against the latency channel; returns the paired trace.

    The deterministic single-threaded schedule per tick is: master ticks
    and sends, the master->slave channel delivers, the slave ticks and
    sends, the slave->master channel delivers (consumed next master tick).
    HELLO frames are exchanged on the first tick; the master emits
    SHUTDOWN after the final tick.
    """
    pinch_of = operator.value if isinstance(operator, PinchScript) else operator
    dt = config.plant.sample_period
    n = int(round(duration_ms / dt))
    master = MasterDevice(
        config.device,
        config.plant,
        config.gains,
        contact_threshold=config.slave.contact_threshold,
        stale_timeout_ms=config.stale_timeout_ms,
    )
    slave = SlaveGripper(config.slave, config.obj)
    to_slave = Channel(config.channel, random.Random(config.seed))
    to_master = Channel(config.channel, random.Random(config.seed + 0x9E3779B9))

    cols = {name: np.empty(n + 1) for name in
            ("t", "target", "actual", "voltage", "displacement",
             "slave_force", "slave_position", "latency")}

    to_slave.send(encode_frame(master.hello(0.0)), 0.0)
    to_master.send(encode_frame(slave.hello(0.0)), 0.0)

    def decode_all(channel, now, tick):
        try:
            return [(decode_frame(b), lat) for b, lat in channel.poll(now)]
        except FrameError as e:
            raise type(e)(f"tick {tick}: {e}") from e

    for k in range(n + 1):
        now = k * dt
        pinch = pinch_of(now)
        out_m = master.tick(now, pinch, decode_all(to_master, now, k))
        to_slave.send(encode_frame(out_m), now)
        out_s = slave.tick(now, dt, decode_all(to_slave, now, k))
        to_master.send(encode_frame(out_s), now)

        cols["t"][k] = now
        cols["target"][k] = master.target_force
        cols["actual"][k] = master.local_force
        cols["voltage"][k] = master.voltage
        cols["displacement"][k] = pinch
        cols["slave_force"][k] = slave.force
        cols["slave_position"][k] = slave.position
        cols["latency"][k] = master.last_latency_ms

    to_slave.send(encode_frame(master._stamp(MsgType.SHUTDOWN, n * dt, 0.0, 0.0)), n * dt)
    return SessionTrace(
        t=cols["t"],
        target_force=cols["target"],
        actual_force=cols["actual"],
        voltage=cols["voltage"],
        displacement=cols["displacement"],
        slave_force=cols["slave_force"],
        slave_position=cols["slave_position"],
        latency=cols["latency"],
    )
