"""Discrete-time force dynamics and closed-loop control.

The force response of the device is modeled as a first-order lag from the
static force map toward which the output relaxes; the controller is a
discrete PI running at the 1 ms device cycle with output clamped to the
drive-voltage range and conditional anti-windup.

The lag is integrated with a forward-Euler step per cycle.  The default
time constant is calibrated so that the Euler chain at a 1 ms step exactly
reproduces a 24.1 ms continuous-time exponential at the sample instants,
which puts the simulated 10-90% rise time at 53 ms.  The closed-form
exponential update is provided as an independent cross-check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapabilityError, GeometryError, TraceError
from .mechanism import DeviceConfig, device_static_force
from .trace import SimTrace
from .waveform import CompositeWaveform, sample_voltage, validate_waveform

# Continuous-time lag whose 10-90% rise (tau * ln 9) is ~53 ms.
RESPONSE_TIME_CONSTANT_MS = 24.1

# Forward-Euler equivalent at a 1 ms step: 1 - dt/tau_d = exp(-dt/24.1),
# so the discrete chain lands exactly on the 24.1 ms exponential.
DEFAULT_TIME_CONSTANT_MS = 1.0 / (1.0 - math.exp(-1.0 / RESPONSE_TIME_CONSTANT_MS))


@dataclass(frozen=True)
class PlantParams:
    """First-order force plant: time constant and sample period, both ms."""

    time_constant: float = DEFAULT_TIME_CONSTANT_MS
    sample_period: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.time_constant) and self.time_constant > 0):
            raise GeometryError(f"time_constant must be positive, got {self.time_constant!r}")
        if not (0.0 < self.sample_period <= self.time_constant / 5.0):
            raise GeometryError(
                f"sample_period must lie in (0, time_constant/5] for integrator accuracy, "
                f"got {self.sample_period!r} with time_constant {self.time_constant!r}"
            )


@dataclass(frozen=True)
class PiGains:
    """Discrete PI gains; output is the drive voltage command in kV.

    ``ki`` multiplies the raw per-cycle error sum (kV per N per cycle).
    """

    kp: float = 0.75
    ki: float = 0.035
    output_min: float = 0.0
    output_max: float = 6.0

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0:
            raise GeometryError("kp and ki must be >= 0")
        if not self.output_min < self.output_max:
            raise GeometryError("output_min must be < output_max")


@dataclass(frozen=True)
class ControllerState:
    """PI internal state: error accumulator (N cycles) and last output (kV)."""

    integral: float = 0.0
    last_output: float = 0.0


def plant_step(p: PlantParams, force: float, static_target: float) -> float:
    """One forward-Euler step of the force lag toward the static target, N."""
    return force + (p.sample_period / p.time_constant) * (static_target - force)


def exact_plant_step(p: PlantParams, force: float, static_target: float) -> float:
    """Closed-form exponential update over one sample period (cross-check)."""
    a = 1.0 - math.exp(-p.sample_period / p.time_constant)
    return force + a * (static_target - force)


def pi_step(g: PiGains, state: ControllerState, error: float) -> tuple[float, ControllerState]:
    """One PI cycle: returns (clamped voltage command kV, next state).

    The accumulator only advances when the output is not saturated against
    the error's direction (conditional anti-windup).
    """
    candidate = g.kp * error + g.ki * (state.integral + error)
    output = min(max(candidate, g.output_min), g.output_max)
    windup = (candidate > output and error > 0.0) or (candidate < output and error < 0.0)
    integral = state.integral if windup else state.integral + error
    return output, ControllerState(integral=integral, last_output=output)


def static_force_map(dev: DeviceConfig, displacement: float, voltage: float) -> float:
    """Static finger force at (pinch displacement mm, voltage kV), N."""
    return device_static_force(dev, displacement, voltage)


class TargetShape(enum.Enum):
    SINE = "sine"
    SQUARE = "square"
    TRIANGLE = "triangle"


@dataclass(frozen=True)
class TargetSpec:
    """Periodic force target for tracking runs (frequency Hz, force N)."""

    shape: TargetShape = TargetShape.SINE
    frequency: float = 0.08
    amplitude: float = 0.5
    offset: float = 0.6

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise GeometryError(f"target frequency must be positive, got {self.frequency!r}")
        if self.amplitude < 0:
            raise GeometryError("target amplitude must be >= 0")

    def value(self, t_ms: float) -> float:
        phase = (t_ms * 1e-3 * self.frequency) % 1.0
        if self.shape is TargetShape.SINE:
            return self.offset + self.amplitude * math.sin(2.0 * math.pi * phase)
        if self.shape is TargetShape.SQUARE:
            return self.offset + (self.amplitude if phase < 0.5 else -self.amplitude)
        # Triangle, sine-phased: 0 -> +A at T/4 -> -A at 3T/4 -> 0.
        if phase < 0.25:
            level = 4.0 * phase
        elif phase < 0.75:
            level = 2.0 - 4.0 * phase
        else:
            level = 4.0 * phase - 4.0
        return self.offset + self.amplitude * level


def _steps_of(duration_ms: float, dt: float) -> int:
    n = int(round(duration_ms / dt))
    if n < 1:
        raise TraceError(f"duration {duration_ms!r} ms is shorter than one sample period")
    return n


def simulate_step_response(
    dev: DeviceConfig,
    plant: PlantParams,
    step_voltage: float,
    displacement: float,
    duration_ms: float,
) -> SimTrace:
    """Open-loop voltage step at fixed displacement; force starts at rest.

    The target column holds the static asymptote the plant relaxes toward.
    """
    static = static_force_map(dev, displacement, step_voltage)
    n = _steps_of(duration_ms, plant.sample_period)
    actual = np.empty(n + 1)
    force = 0.0
    for k in range(n + 1):
        actual[k] = force
        force = plant_step(plant, force, static)
    t = np.arange(n + 1) * plant.sample_period
    return SimTrace(
        t=t,
        target_force=np.full(n + 1, static),
        actual_force=actual,
        voltage=np.full(n + 1, step_voltage),
        displacement=np.full(n + 1, displacement),
    )


def measure_rise_time(trace: SimTrace) -> float:
    """10-90% rise time of a monotone-envelope step response, ms.

    Crossing times of 10% and 90% of the final value are located by
    linear interpolation between samples.
    """
    final = float(trace.actual_force[-1])
    if final <= trace.actual_force[0]:
        raise TraceError("trace is not a rising step response")

    def first_crossing(level: float) -> float:
        a = trace.actual_force
        above = np.nonzero(a >= level)[0]
        if len(above) == 0:
            raise TraceError(f"trace never crosses level {level:g} N")
        i = int(above[0])
        if i == 0:
            return float(trace.t[0])
        frac = (level - a[i - 1]) / (a[i] - a[i - 1])
        return float(trace.t[i - 1] + frac * (trace.t[i] - trace.t[i - 1]))

    return first_crossing(0.9 * final) - first_crossing(0.1 * final)


def simulate_tracking(
    dev: DeviceConfig,
    plant: PlantParams,
    gains: PiGains,
    target: TargetSpec,
    displacement: float,
    duration_ms: float,
) -> SimTrace:
    """Closed-loop PI force tracking at fixed displacement.

    Raises :class:`CapabilityError` if the target's peak exceeds the static
    force available at the maximum output voltage.
    """
    capability = static_force_map(dev, displacement, gains.output_max)
    peak_target = target.offset + target.amplitude
    if peak_target > capability:
        raise CapabilityError(
            f"target peak {peak_target:g} N exceeds static capability {capability:g} N "
            f"at {gains.output_max:g} kV and {displacement:g} mm"
        )
    dt = plant.sample_period
    n = _steps_of(duration_ms, dt)
    t = np.arange(n + 1) * dt
    tgt = np.empty(n + 1)
    actual = np.empty(n + 1)
    volts = np.empty(n + 1)
    force = 0.0
    state = ControllerState()
    for k in range(n + 1):
        tgt[k] = target.value(t[k])
        actual[k] = force
        u, state = pi_step(gains, state, tgt[k] - force)
        volts[k] = u
        force = plant_step(plant, force, static_force_map(dev, displacement, u))
    return SimTrace(
        t=t,
        target_force=tgt,
        actual_force=actual,
        voltage=volts,
        displacement=np.full(n + 1, displacement),
    )


def simulate_vibration(
    dev: DeviceConfig,
    plant: PlantParams,
    wave: CompositeWaveform,
    displacement: float,
    duration_ms: float,
) -> SimTrace:
    """Open-loop drive by a composite waveform at fixed displacement.

    The waveform is validated against its breakdown limit first.  The
    target column holds the instantaneous static force of the sampled
    voltage (the value the lag is relaxing toward at each cycle).
    """
    validate_waveform(wave)
    dt = plant.sample_period
    n = _steps_of(duration_ms, dt)
    t = np.arange(n + 1) * dt
    tgt = np.empty(n + 1)
    actual = np.empty(n + 1)
    volts = np.empty(n + 1)
    force = 0.0
    for k in range(n + 1):
        u = sample_voltage(wave, t[k] * 1e-3)
        static = static_force_map(dev, displacement, u)
        volts[k] = u
        tgt[k] = static
        actual[k] = force
        force = plant_step(plant, force, static)
    return SimTrace(
        t=t,
        target_force=tgt,
        actual_force=actual,
        voltage=volts,
        displacement=np.full(n + 1, displacement),
    )


@dataclass(frozen=True)
class RippleResult:
    """Dominant in-band ripple: frequency (Hz, None if no content) and amplitude (N)."""

    frequency: Optional[float]
    amplitude: float


def ripple_analysis(trace: SimTrace, band_hz: tuple[float, float]) -> RippleResult:
    """Dominant steady-state force ripple within a frequency band.

    The first 20% of the trace is discarded as transient.  The dominant
    frequency is the argmax of the discrete Fourier magnitude within the
    band (DC excluded); the amplitude is half the peak-to-peak span of the
    band-passed steady-state signal.
    """
    low, high = band_hz
    if not (0.0 < low < high):
        raise TraceError(f"band must satisfy 0 < low < high, got {band_hz!r}")
    dt_s = trace.dt * 1e-3
    if len(trace) * dt_s < 5.0 / low:
        raise TraceError(
            f"trace covers {len(trace) * dt_s:g} s; "
            f"need at least 5 periods of the band low edge ({5.0 / low:g} s)"
        )
    n0 = int(len(trace) * 0.2)
    window = trace.actual_force[n0:]
    x = window - window.mean()
    spectrum = np.fft.rfft(x)
    freqs = np.fft.rfftfreq(len(x), dt_s)
    mask = (freqs >= low) & (freqs <= high) & (freqs > 0.0)
    magnitude = np.where(mask, np.abs(spectrum), 0.0)
    banded = np.fft.irfft(np.where(mask, spectrum, 0.0), n=len(x))
    amplitude = float(banded.max() - banded.min()) / 2.0
    if magnitude.max() == 0.0:
        return RippleResult(frequency=None, amplitude=amplitude)
    return RippleResult(frequency=float(freqs[int(np.argmax(magnitude))]), amplitude=amplitude)
