"""Drive waveform synthesis: sampling, periodicity, breakdown validation."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from ehsim.errors import BreakdownRiskError, GeometryError
from ehsim.waveform import (
    CompositeWaveform,
    SineOverlay,
    SquareWaveSpec,
    common_period,
    peak_voltage,
    sample_voltage,
    validate_waveform,
)

SQUARE = SquareWaveSpec(frequency=20.0, amplitude=3.5, slew_rate=10.0)
OVERLAY = SineOverlay(frequency=5.0, amplitude=2.5)
COMPOSITE = CompositeWaveform(square=SQUARE, overlay=OVERLAY)


class TestSampling:
    def test_plateau_value(self):
        # 5 ms is mid first half-cycle, past the 0.35 ms startup ramp
        w = CompositeWaveform(square=SQUARE)
        assert sample_voltage(w, 0.005) == 3.5

    def test_negative_plateau(self):
        w = CompositeWaveform(square=SQUARE)
        # 35 ms is mid second half-cycle, past the 0.7 ms polarity ramp
        assert sample_voltage(w, 0.035) == -3.5

    def test_startup_ramp_from_zero(self):
        w = CompositeWaveform(square=SQUARE)
        assert sample_voltage(w, 0.0) == 0.0
        # 10 kV/ms: at 0.1 ms the startup ramp reads 1.0 kV
        assert sample_voltage(w, 0.0001) == pytest.approx(1.0, rel=1e-9)

    def test_zero_amplitude(self):
        w = CompositeWaveform(square=SquareWaveSpec(amplitude=0.0))
        for t in np.linspace(0.0, 0.3, 50):
            assert sample_voltage(w, t) == 0.0

    def test_overlay_adds_sine(self):
        t = 0.005
        base = sample_voltage(CompositeWaveform(square=SQUARE), t)
        combined = sample_voltage(COMPOSITE, t)
        assert combined == pytest.approx(base + 2.5 * math.sin(2 * math.pi * 5.0 * t), rel=1e-12)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            sample_voltage(COMPOSITE, -0.001)

    def test_infinite_slew_square_of_sample_constant(self):
        w = CompositeWaveform(square=SquareWaveSpec(frequency=20.0, amplitude=3.5,
                                                    slew_rate=math.inf))
        rng = np.random.default_rng(3)
        for t in rng.uniform(0.0, 1.0, size=500):
            assert sample_voltage(w, t) ** 2 == pytest.approx(3.5**2, rel=1e-12)
        # including exactly at the transition instants
        for k in range(8):
            assert abs(sample_voltage(w, k * 0.025)) == 3.5


class TestPeriodicity:
    def test_common_period(self):
        assert common_period(COMPOSITE) == pytest.approx(0.2, rel=1e-12)
        assert common_period(CompositeWaveform(square=SQUARE)) == pytest.approx(0.05)
        odd = CompositeWaveform(square=SQUARE, overlay=SineOverlay(frequency=12.0, amplitude=1.0))
        assert common_period(odd) == pytest.approx(0.25, rel=1e-9)

    def test_steady_state_periodicity(self):
        # after the startup ramp window the signal repeats each common period
        period = common_period(COMPOSITE)
        rng = np.random.default_rng(11)
        for s in rng.uniform(0.0, period, size=400):
            assert sample_voltage(COMPOSITE, s + period) == pytest.approx(
                sample_voltage(COMPOSITE, s + 2 * period), abs=1e-9)

    def test_zero_mean_over_steady_period(self):
        # piecewise quadrature between slew kinks; smooth pieces are exact
        period = common_period(COMPOSITE)
        half = 0.5 / SQUARE.frequency
        ramp = 2.0 * SQUARE.amplitude / (SQUARE.slew_rate * 1000.0)
        kinks = sorted(
            {period, 2.0 * period}
            | {k * half for k in range(8, 17)}
            | {k * half + ramp for k in range(8, 17)}
        )
        kinks = [t for t in kinks if period <= t <= 2.0 * period]
        total = 0.0
        for a, b in zip(kinks, kinks[1:]):
            piece, _ = quad(lambda t: sample_voltage(COMPOSITE, t), a, b, limit=200)
            total += piece
        scale = (SQUARE.amplitude + OVERLAY.amplitude) * period
        assert abs(total) / scale < 1e-9


class TestSlewLimit:
    def test_rate_bound(self):
        overlay_slope = OVERLAY.amplitude * 2.0 * math.pi * OVERLAY.frequency / 1000.0  # kV/ms
        bound = SQUARE.slew_rate + overlay_slope
        delta_ms = 0.01
        t = np.arange(0.0, 600.0, delta_ms)
        u = np.array([sample_voltage(COMPOSITE, ti * 1e-3) for ti in t])
        rates = np.abs(np.diff(u)) / delta_ms
        assert rates.max() <= bound + 1e-9

    def test_transition_shorter_than_half_period(self):
        with pytest.raises(GeometryError):
            SquareWaveSpec(frequency=20.0, amplitude=3.5, slew_rate=0.25)


class TestValidation:
    def test_max_operating_amplitude_accepted(self):
        w = CompositeWaveform(square=SquareWaveSpec(frequency=20.0, amplitude=6.0))
        assert validate_waveform(w) == pytest.approx(6.0, rel=1e-12)

    def test_composite_accepted_with_amplitude_sum_peak(self):
        assert validate_waveform(COMPOSITE) == pytest.approx(6.0, rel=1e-12)

    def test_breakdown_rejected_with_peak(self):
        w = CompositeWaveform(square=SquareWaveSpec(frequency=20.0, amplitude=5.0),
                              overlay=SineOverlay(frequency=5.0, amplitude=2.5))
        with pytest.raises(BreakdownRiskError) as err:
            validate_waveform(w)
        assert err.value.peak_kv == pytest.approx(7.5, rel=1e-12)
        assert err.value.limit_kv == 7.0

    def test_peak_alignment_exists(self):
        # the 20 Hz plateau and 5 Hz crest align because the periods divide
        period = common_period(COMPOSITE)
        t = period + np.arange(0.0, period, 1e-5)
        u = np.array([sample_voltage(COMPOSITE, ti) for ti in t])
        assert np.abs(u).max() == pytest.approx(6.0, abs=2e-3)
        assert peak_voltage(COMPOSITE) == pytest.approx(6.0, rel=1e-12)
