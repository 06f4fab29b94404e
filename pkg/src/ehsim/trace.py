"""Simulation traces and their CSV persistence.

A trace is a fixed-rate record of one simulation run.  The CSV layout is
part of the external contract: header row exactly as below, one row per
sample, values with 12 significant digits so that metrics recomputed from
a file agree with in-memory values to far better than 1e-9 relative.

    t_ms,target_force_N,actual_force_N,voltage_kV,displacement_mm

Teleoperation traces append three columns:

    slave_force_N,slave_position_mm,latency_ms
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import TraceError

TRACE_COLUMNS = ("t_ms", "target_force_N", "actual_force_N", "voltage_kV", "displacement_mm")
SESSION_COLUMNS = TRACE_COLUMNS + ("slave_force_N", "slave_position_mm", "latency_ms")


def _as_array(values) -> np.ndarray:
    return np.asarray(values, dtype=float)


@dataclass
class SimTrace:
    """Fixed-rate simulation record; all arrays share one length."""

    t: np.ndarray             # ms
    target_force: np.ndarray  # N
    actual_force: np.ndarray  # N
    voltage: np.ndarray       # kV
    displacement: np.ndarray  # mm

    def __post_init__(self):
        self.t = _as_array(self.t)
        self.target_force = _as_array(self.target_force)
        self.actual_force = _as_array(self.actual_force)
        self.voltage = _as_array(self.voltage)
        self.displacement = _as_array(self.displacement)
        n = len(self.t)
        if n < 2:
            raise TraceError("a trace needs at least two samples")
        for name in ("target_force", "actual_force", "voltage", "displacement"):
            if len(getattr(self, name)) != n:
                raise TraceError(f"column {name} has length {len(getattr(self, name))}, expected {n}")
            if not np.all(np.isfinite(getattr(self, name))):
                raise TraceError(f"column {name} contains non-finite values")
        steps = np.diff(self.t)
        if not np.all(steps > 0):
            raise TraceError("trace times must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-9):
            raise TraceError("trace time step must be constant")

    @property
    def dt(self) -> float:
        """Sample period, ms."""
        return float(self.t[1] - self.t[0])

    def __len__(self) -> int:
        return len(self.t)


@dataclass
class SessionTrace(SimTrace):
    """Teleoperation trace: master columns plus slave state and latency."""

    slave_force: np.ndarray = None     # N
    slave_position: np.ndarray = None  # mm
    latency: np.ndarray = None         # ms

    def __post_init__(self):
        super().__post_init__()
        for name in ("slave_force", "slave_position", "latency"):
            if getattr(self, name) is None:
                raise TraceError(f"session trace requires column {name}")
            setattr(self, name, _as_array(getattr(self, name)))
            if len(getattr(self, name)) != len(self.t):
                raise TraceError(f"column {name} has length {len(getattr(self, name))}, "
                                 f"expected {len(self.t)}")
            if not np.all(np.isfinite(getattr(self, name))):
                raise TraceError(f"column {name} contains non-finite values")


def _columns_of(trace: SimTrace):
    cols = [trace.t, trace.target_force, trace.actual_force, trace.voltage, trace.displacement]
    if isinstance(trace, SessionTrace):
        return SESSION_COLUMNS, cols + [trace.slave_force, trace.slave_position, trace.latency]
    return TRACE_COLUMNS, cols


def write_trace(trace: SimTrace, path: Union[str, Path]) -> Path:
    """Write a trace as CSV; deterministic byte-for-byte for equal traces."""
    path = Path(path)
    header, cols = _columns_of(trace)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([format(v, ".12g") for v in row])
    return path


def read_trace(path: Union[str, Path]) -> SimTrace:
    """Read a trace CSV back; header must match one of the two layouts."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header == TRACE_COLUMNS:
            session = False
        elif header == SESSION_COLUMNS:
            session = True
        else:
            raise TraceError(f"unrecognized trace header: {header!r}")
        rows = [[float(v) for v in row] for row in reader]
    if not rows:
        raise TraceError("trace file has no data rows")
    data = np.array(rows, dtype=float).T
    if session:
        return SessionTrace(*data)
    return SimTrace(*data)
