"""Two-process teleoperation over a TCP loopback socket.

The same endpoint machines as the deterministic in-process session, paced
against the wall clock at the 1 kHz device cycle and framed as contiguous
28-byte messages on a reliable ordered stream.  Wall-clock pacing and
kernel scheduling make two-process runs statistically equivalent to, but
not bit-identical with, the in-process scheduler.
"""

from __future__ import annotations

import socket
import time
from pathlib import Path
from typing import Optional

import numpy as np

from ..config import ExperimentConfig
from ..errors import SimError
from ..trace import SessionTrace, write_trace
from .protocol import FRAME_SIZE, MsgType, TeleopFrame, decode_frame, encode_frame
from .session import MasterDevice, PinchScript, SlaveGripper


def parse_endpoint(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise SimError(f"endpoint must look like HOST:PORT, got {value!r}")
    try:
        return host, int(port)
    except ValueError:
        raise SimError(f"endpoint port must be an integer, got {port!r}") from None


class _FrameStream:
    """Nonblocking fixed-length framing over a connected socket."""

    def __init__(self, sock: socket.socket):
        sock.setblocking(False)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self.sock = sock
        self._buffer = b""
        self.closed = False

    def send(self, frame: TeleopFrame):
        self.sock.sendall(encode_frame(frame))

    def poll(self) -> list[TeleopFrame]:
        try:
            while True:
                chunk = self.sock.recv(4096)
                if not chunk:
                    self.closed = True
                    break
                self._buffer += chunk
        except BlockingIOError:
            pass
        frames = []
        while len(self._buffer) >= FRAME_SIZE:
            frames.append(decode_frame(self._buffer[:FRAME_SIZE]))
            self._buffer = self._buffer[FRAME_SIZE:]
        return frames


def _now_us() -> int:
    return time.monotonic_ns() // 1000


def _wall_stamped(frame: TeleopFrame) -> TeleopFrame:
    """Replace a machine's tick-time stamp with the shared wall clock.

    One-way latency across processes is only measurable against a common
    clock; CLOCK_MONOTONIC is shared by all processes on the host.
    """
    return TeleopFrame(
        msg_type=frame.msg_type,
        seq=frame.seq,
        timestamp_us=_now_us(),
        payload_a=frame.payload_a,
        payload_b=frame.payload_b,
    )


def _pace(t0_ns: int, tick: int, dt_ms: float):
    deadline = t0_ns + int(tick * dt_ms * 1e6)
    while True:
        remaining = deadline - time.monotonic_ns()
        if remaining <= 0:
            return
        time.sleep(min(remaining / 1e9, 0.0005))


def serve_slave(
    cfg: ExperimentConfig,
    listen: str,
    object_label: Optional[str] = None,
    duration_ms: Optional[float] = None,
    on_listening=None,
) -> dict:
    """Run the gripper endpoint; blocks until SHUTDOWN, disconnect or timeout.

    ``on_listening(host, port)`` is invoked once the socket is bound, so
    callers (and tests) can learn an ephemeral port.
    """
    host, port = parse_endpoint(listen)
    obj = cfg.find_object(object_label) if object_label else cfg.teleop.objects[0]
    slave = SlaveGripper(cfg.teleop.slave, obj)
    dt = cfg.plant.sample_period
    with socket.create_server((host, port)) as server:
        bound_host, bound_port = server.getsockname()[:2]
        if on_listening is not None:
            on_listening(bound_host, bound_port)
        server.settimeout(30.0)
        conn, _ = server.accept()
        with conn:
            stream = _FrameStream(conn)
            stream.send(_wall_stamped(slave.hello(0.0)))
            t0 = time.monotonic_ns()
            tick = 0
            while True:
                _pace(t0, tick, dt)
                now_ms = tick * dt
                inbound = [(f, 0.0) for f in stream.poll()]
                stream.send(_wall_stamped(slave.tick(now_ms, dt, inbound)))
                tick += 1
                if slave.shutdown_received or stream.closed:
                    break
                if duration_ms is not None and now_ms >= duration_ms:
                    break
    return {
        "role": "slave",
        "object": obj.label,
        "ticks": tick,
        "final_position_mm": slave.position,
        "final_force_n": slave.force,
    }


def run_master(
    cfg: ExperimentConfig,
    connect: str,
    duration_ms: float,
    out_dir: Path,
) -> dict:
    """Run the haptic-device endpoint against a listening slave; writes a trace."""
    host, port = parse_endpoint(connect)
    params = cfg.experiments.teleop_demo
    script = PinchScript.ramp_hold(params.target_pinch, params.ramp)
    master = MasterDevice(
        cfg.device(),
        cfg.plant,
        cfg.controller,
        contact_threshold=cfg.teleop.slave.contact_threshold,
        stale_timeout_ms=cfg.teleop.stale_timeout,
    )
    dt = cfg.plant.sample_period
    n = int(round(duration_ms / dt))
    cols = {name: np.empty(n + 1) for name in
            ("t", "target", "actual", "voltage", "displacement",
             "slave_force", "slave_position", "latency")}
    slave_pos = 0.0
    slave_force = 0.0
    with socket.create_connection((host, port), timeout=30.0) as sock:
        stream = _FrameStream(sock)
        stream.send(_wall_stamped(master.hello(0.0)))
        t0 = time.monotonic_ns()
        for k in range(n + 1):
            _pace(t0, k, dt)
            now_ms = k * dt
            inbound = []
            for frame in stream.poll():
                latency_ms = max(0.0, (_now_us() - frame.timestamp_us) / 1000.0)
                inbound.append((frame, latency_ms))
                if frame.msg_type is MsgType.SLAVE_STATE:
                    slave_pos = frame.payload_a
                    slave_force = frame.payload_b
            pinch = script.value(now_ms)
            stream.send(_wall_stamped(master.tick(now_ms, pinch, inbound)))
            cols["t"][k] = now_ms
            cols["target"][k] = master.target_force
            cols["actual"][k] = master.local_force
            cols["voltage"][k] = master.voltage
            cols["displacement"][k] = pinch
            cols["slave_force"][k] = slave_force
            cols["slave_position"][k] = slave_pos
            cols["latency"][k] = master.last_latency_ms
        stream.send(TeleopFrame(msg_type=MsgType.SHUTDOWN, seq=0xFFFF,
                                timestamp_us=_now_us()))
    trace = SessionTrace(
        t=cols["t"],
        target_force=cols["target"],
        actual_force=cols["actual"],
        voltage=cols["voltage"],
        displacement=cols["displacement"],
        slave_force=cols["slave_force"],
        slave_position=cols["slave_position"],
        latency=cols["latency"],
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    path = write_trace(trace, out_dir / "teleop_master.csv")
    tail = trace.t >= 0.8 * duration_ms
    return {
        "role": "master",
        "duration_ms": duration_ms,
        "steady_master_force_n": float(trace.actual_force[tail].mean()),
        "steady_slave_force_n": float(trace.slave_force[tail].mean()),
        "final_slave_position_mm": float(trace.slave_position[-1]),
        "mean_latency_ms": float(trace.latency[tail].mean()),
        "files": [path.name],
    }
