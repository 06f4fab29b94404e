"""High-voltage drive waveform synthesis and validation.

The drive signal is an AC square wave with slew-limited (trapezoidal)
edges, optionally superimposed with a low-frequency sine overlay.  An
ideal square keeps u^2 constant and therefore produces no force ripple;
the finite slew and the overlay are the two pathways by which ripple
enters the force model.

Time is in seconds here (frequencies are Hz); the slew rate is kV/ms to
match the control-loop unit regime.  The square starts at +amplitude at
t = 0, reached through an initial ramp from 0; the overlay at phase 0
starts rising.  Peak validation guards the dielectric breakdown limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import BreakdownRiskError, GeometryError

# Breakdown threshold of the bladder dielectric, kV.
DEFAULT_BREAKDOWN_LIMIT = 7.0


@dataclass(frozen=True)
class SquareWaveSpec:
    """AC square wave with finite-rate edges.

    ``slew_rate`` is in kV/ms and may be ``math.inf`` for ideal edges.
    The full polarity swing (2 * amplitude) must complete within a
    half-period.
    """

    frequency: float = 20.0      # Hz
    amplitude: float = 3.5       # kV
    slew_rate: float = 10.0      # kV/ms

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise GeometryError(f"square frequency must be positive, got {self.frequency!r}")
        if not (self.amplitude >= 0 and math.isfinite(self.amplitude)):
            raise GeometryError(f"square amplitude must be >= 0, got {self.amplitude!r}")
        if not self.slew_rate > 0:
            raise GeometryError(f"slew rate must be positive, got {self.slew_rate!r}")
        half_period_ms = 500.0 / self.frequency
        if not math.isinf(self.slew_rate) and 2.0 * self.amplitude / self.slew_rate >= half_period_ms:
            raise GeometryError(
                "slew transition must be shorter than a half-period: "
                f"swing takes {2.0 * self.amplitude / self.slew_rate:g} ms, "
                f"half-period is {half_period_ms:g} ms"
            )


@dataclass(frozen=True)
class SineOverlay:
    """Sine superimposed on the square wave (frequency Hz, amplitude kV)."""

    frequency: float
    amplitude: float
    phase: float = 0.0           # rad

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise GeometryError(f"overlay frequency must be positive, got {self.frequency!r}")
        if not (self.amplitude >= 0 and math.isfinite(self.amplitude)):
            raise GeometryError(f"overlay amplitude must be >= 0, got {self.amplitude!r}")


@dataclass(frozen=True)
class CompositeWaveform:
    """Slew-limited square plus optional sine overlay with a breakdown guard."""

    square: SquareWaveSpec
    overlay: Optional[SineOverlay] = None
    breakdown_limit: float = DEFAULT_BREAKDOWN_LIMIT

    def __post_init__(self):
        if not (math.isfinite(self.breakdown_limit) and self.breakdown_limit > 0):
            raise GeometryError(f"breakdown limit must be positive, got {self.breakdown_limit!r}")


def _square_value(spec: SquareWaveSpec, t: float) -> float:
    """Slew-limited square sample, stateless closed form.

    Each half-cycle ramps from the previous plateau to the new one at the
    slew rate, then holds.  The very first half-cycle ramps from 0 instead
    of -amplitude, so exact periodicity holds from the second period on.
    """
    if spec.amplitude == 0.0:
        return 0.0
    half = 0.5 / spec.frequency
    k = int(t / half)
    target = spec.amplitude if k % 2 == 0 else -spec.amplitude
    if math.isinf(spec.slew_rate):
        return target
    prev = 0.0 if k == 0 else -target
    ramp = spec.slew_rate * 1000.0 * (t - k * half)  # kV/ms -> kV/s
    swing = abs(target - prev)
    if ramp >= swing:
        return target
    return prev + math.copysign(ramp, target - prev)


def sample_voltage(w: CompositeWaveform, t: float) -> float:
    """Drive voltage u0(t) in kV at time t (seconds, t >= 0)."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    u = _square_value(w.square, t)
    if w.overlay is not None:
        ov = w.overlay
        u += ov.amplitude * math.sin(2.0 * math.pi * ov.frequency * t + ov.phase)
    return u


def common_period(w: CompositeWaveform) -> float:
    """Least common period of square and overlay, s.

    Computed from the rational greatest common divisor of the two
    frequencies; requires a rational frequency ratio (float frequencies
    are snapped to rationals with denominator <= 1e6).
    """
    if w.overlay is None:
        return 1.0 / w.square.frequency
    f1 = Fraction(w.square.frequency).limit_denominator(1_000_000)
    f2 = Fraction(w.overlay.frequency).limit_denominator(1_000_000)
    gcd = Fraction(math.gcd(f1.numerator * f2.denominator, f2.numerator * f1.denominator),
                   f1.denominator * f2.denominator)
    return float(1 / gcd)


def peak_voltage(w: CompositeWaveform, samples_per_second: float = 10_000.0) -> float:
    """Peak |u0| over one common period, kV.

    Uses the analytic bound (square amplitude + overlay amplitude) backed
    by dense sampling over one steady-state common period; the larger of
    the two is returned.
    """
    bound = w.square.amplitude + (w.overlay.amplitude if w.overlay is not None else 0.0)
    period = common_period(w)
    n = max(2, int(math.ceil(period * samples_per_second)))
    # Sample the second period so the startup ramp does not mask a plateau.
    sampled = max(abs(sample_voltage(w, period + i * period / n)) for i in range(n + 1))
    return max(bound, sampled)


def validate_waveform(w: CompositeWaveform) -> float:
    """Check the waveform against its breakdown limit; returns the peak, kV.

    Raises :class:`BreakdownRiskError` carrying the offending peak if it
    exceeds the limit.
    """
    peak = peak_voltage(w)
    if peak > w.breakdown_limit:
        raise BreakdownRiskError(peak_kv=peak, limit_kv=w.breakdown_limit)
    return peak
