"""Experiment runners: outputs, summaries, determinism, CSV/metric agreement."""

import json

import numpy as np
import pytest

from ehsim.config import config_from_dict, default_config
from ehsim.control import measure_rise_time, ripple_analysis
from ehsim.errors import SimError
from ehsim.experiments import (
    CALIBRATION_MEASUREMENTS,
    CALIBRATION_RAW_MEASUREMENTS,
    run_experiment,
    steady_window_start,
)
from ehsim.trace import read_trace

CFG = default_config()


class TestFixture:
    def test_raw_rows_average_to_bundled_points(self):
        for (d, avg) in CALIBRATION_MEASUREMENTS:
            mean = sum(CALIBRATION_RAW_MEASUREMENTS[d]) / 3.0
            assert avg == pytest.approx(mean, abs=5e-5)  # published averages are rounded


class TestCalibrate:
    def test_fitted_k_in_band(self, tmp_path):
        summary = run_experiment("calibrate", CFG, tmp_path)
        assert 8.0e-5 <= summary["fitted_k"] <= 1.1e-4
        assert summary["fitted_k"] == pytest.approx(9.0316e-5, rel=1e-3)
        assert (tmp_path / "calibrate.csv").exists()
        assert (tmp_path / "calibrate_summary.json").exists()

    def test_summary_json_parses(self, tmp_path):
        run_experiment("calibrate", CFG, tmp_path)
        data = json.loads((tmp_path / "calibrate_summary.json").read_text())
        assert data["experiment"] == "calibrate"
        assert len(data["points"]) == 3


class TestForceCurve:
    def test_monotone_nondecreasing_force(self, tmp_path):
        summary = run_experiment("force-curve", CFG, tmp_path)
        for name in summary["files"]:
            trace = read_trace(tmp_path / name)
            assert np.all(np.diff(trace.actual_force) >= 0.0)

    def test_comparison_within_15_percent(self, tmp_path):
        summary = run_experiment("force-curve", CFG, tmp_path)
        for point in summary["comparison_at_calibration_voltage"]:
            assert abs(point["gap_fraction"]) < 0.15


class TestMaxForce:
    def test_finite_nonnegative_with_preload_jump(self, tmp_path):
        summary = run_experiment("max-force", CFG, tmp_path)
        trace = read_trace(tmp_path / summary["files"][0])
        assert np.all(np.isfinite(trace.actual_force))
        assert np.all(trace.actual_force >= 0.0)
        assert summary["force_at_zero_pinch_n"] > 0.0
        assert trace.displacement[-1] == pytest.approx(15.0)
        assert summary["reference_envelope_n"] == [2.0, 5.0]

    def test_no_preload_no_jump(self, tmp_path):
        cfg = config_from_dict({"actuator": {"preload": 0.0}})
        summary = run_experiment("max-force", cfg, tmp_path)
        assert summary["force_at_zero_pinch_n"] == 0.0


class TestStepResponse:
    def test_rise_time_53_ms(self, tmp_path):
        summary = run_experiment("step-response", CFG, tmp_path)
        assert summary["rise_time_ms"] == pytest.approx(53.0, abs=1.0)

    def test_metric_recomputable_from_csv(self, tmp_path):
        summary = run_experiment("step-response", CFG, tmp_path)
        trace = read_trace(tmp_path / summary["files"][0])
        assert measure_rise_time(trace) == pytest.approx(summary["rise_time_ms"], rel=1e-9)
        assert len(trace) == int(CFG.experiments.step_response.duration) + 1


class TestTrack:
    def test_rms_error_and_csv_agreement(self, tmp_path):
        summary = run_experiment("track", CFG, tmp_path)
        assert summary["rms_error_fraction_of_amplitude"] < 0.05
        trace = read_trace(tmp_path / summary["files"][0])
        start = steady_window_start(summary["duration_ms"],
                                    1000.0 / summary["target"]["frequency_hz"])
        steady = trace.t >= start
        err = trace.target_force[steady] - trace.actual_force[steady]
        rms = float(np.sqrt(np.mean(err**2)))
        assert rms == pytest.approx(summary["rms_error_n"], rel=1e-9)


class TestVibrate:
    def test_ripple_and_csv_agreement(self, tmp_path):
        summary = run_experiment("vibrate", CFG, tmp_path)
        assert summary["ripple_amplitude_n"] > 1e-4
        trace = read_trace(tmp_path / summary["files"][0])
        again = ripple_analysis(trace, tuple(summary["band_hz"]))
        assert again.amplitude == pytest.approx(summary["ripple_amplitude_n"], rel=1e-9)
        assert again.frequency == pytest.approx(summary["ripple_frequency_hz"], rel=1e-9)


class TestTeleopDemo:
    def test_objects_ordered_by_stiffness(self, tmp_path):
        summary = run_experiment("teleop-demo", CFG, tmp_path, duration=4000.0)
        assert summary["stiffness_order"] == [
            "hose_soft", "hose_stiffening", "spring_light", "spring_heavy"]
        assert len(summary["files"]) == 4

    def test_single_object_selection(self, tmp_path):
        cfg = config_from_dict({"experiments": {"teleop_demo": {"object": "spring_light"}}})
        summary = run_experiment("teleop-demo", cfg, tmp_path, duration=3000.0)
        assert [r["object"] for r in summary["objects"]] == ["spring_light"]
        assert summary["objects"][0]["steady_slave_force_n"] == pytest.approx(0.9, rel=1e-6)


class TestHarness:
    def test_unknown_experiment(self, tmp_path):
        with pytest.raises(SimError, match="unknown experiment"):
            run_experiment("levitate", CFG, tmp_path)

    def test_errors_carry_experiment_context(self, tmp_path):
        bad = config_from_dict({"waveform": {"square": {"amplitude": 5.0}}})
        with pytest.raises(SimError, match="vibrate"):
            run_experiment("vibrate", bad, tmp_path)

    @pytest.mark.parametrize("name", ["calibrate", "step-response", "vibrate"])
    def test_byte_identical_reruns(self, tmp_path, name):
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        s1 = run_experiment(name, CFG, d1)
        s2 = run_experiment(name, CFG, d2)
        assert s1 == s2
        for f in s1["files"]:
            assert (d1 / f).read_bytes() == (d2 / f).read_bytes()

    def test_teleop_demo_byte_identical_with_seed(self, tmp_path):
        cfg = config_from_dict({"seed": 11, "teleop": {"channel": {"base_latency": 3.0,
                                                                   "jitter": 2.0}}})
        s1 = run_experiment("teleop-demo", cfg, tmp_path / "a", duration=1500.0)
        s2 = run_experiment("teleop-demo", cfg, tmp_path / "b", duration=1500.0)
        assert s1 == s2
        for f in s1["files"]:
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
