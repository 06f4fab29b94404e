"""Named experiment runners and their trace/summary outputs.

Each runner consumes a validated :class:`~ehsim.config.ExperimentConfig`,
writes one or more CSV traces plus a JSON summary into an output
directory, and returns the summary.  Runs are deterministic: the same
config and seed produce byte-identical files.

Runners
-------
calibrate      fit the mixing parameter K to the bundled squeeze-force
               measurement set
force-curve    squeeze-displacement force sweep of one stack at several
               drive amplitudes
max-force      finger-force sweep over the full pinch stroke
step-response  open-loop voltage step and 10-90% rise time
track          closed-loop PI tracking of a periodic force target
vibrate        open-loop composite-waveform drive and ripple analysis
teleop-demo    deterministic bilateral grasp sessions on virtual objects
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .actuator import (
    DisplacementConvention,
    StackConfig,
    calibrate_k,
    squeezed_area,
    stack_force,
)
from .config import ExperimentConfig
from .control import (
    measure_rise_time,
    ripple_analysis,
    simulate_step_response,
    simulate_tracking,
    simulate_vibration,
    static_force_map,
)
from .errors import SimError
from .teleop.session import PinchScript, SessionConfig, run_session
from .trace import SimTrace, write_trace

# Bundled three-point squeeze-force measurement set: a three-actuator
# stack driven at 6 kV, loaded to fixed total displacements (mm), with
# three force readings (N) per point and their published averages.
CALIBRATION_RAW_MEASUREMENTS = {
    0.125: (0.2785, 0.2830, 0.2750),
    0.250: (0.5260, 0.5250, 0.5273),
    0.375: (0.8552, 0.8573, 0.8573),
}
CALIBRATION_MEASUREMENTS = ((0.125, 0.2788), (0.250, 0.5261), (0.375, 0.8566))
CALIBRATION_STACK = StackConfig(
    actuator_count=3,
    convention=DisplacementConvention.TOTAL_AS_DELTA_H,
)

# Reference finger-force envelope measured on hardware over the pinch
# stroke, N; recorded in the max-force summary for comparison only.
REFERENCE_MAX_FORCE_ENVELOPE = (2.0, 5.0)

# Quasi-static press speed used to express sweeps on a time axis, mm/s.
SWEEP_SPEED = 1.0


def _quasi_static_trace(displacements: np.ndarray, forces: np.ndarray,
                        voltage: float) -> SimTrace:
    """Express a displacement sweep as a 1 mm/s quasi-static time series."""
    t = displacements / SWEEP_SPEED * 1000.0
    return SimTrace(
        t=t,
        target_force=forces,
        actual_force=forces,
        voltage=np.full(len(t), voltage),
        displacement=displacements,
    )


def _write_summary(summary: dict, out_dir: Path, name: str) -> Path:
    path = out_dir / f"{name}_summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return path


def run_calibrate(cfg: ExperimentConfig, out_dir: Path) -> dict:
    u_cal = cfg.calibration.calibration_voltage
    fitted = calibrate_k(CALIBRATION_MEASUREMENTS, u_cal, cfg.actuator, CALIBRATION_STACK)
    k = fitted.mixing_parameter

    def predict(displacement: float, mixing: float) -> float:
        area = squeezed_area(cfg.actuator, CALIBRATION_STACK.effective_delta_h(displacement))
        return 2.0 * mixing * u_cal**2 * area

    points = []
    for displacement, measured in CALIBRATION_MEASUREMENTS:
        fit_pred = predict(displacement, k)
        cfg_pred = predict(displacement, cfg.calibration.mixing_parameter)
        points.append({
            "displacement_mm": displacement,
            "measured_force_n": measured,
            "fitted_prediction_n": fit_pred,
            "config_prediction_n": cfg_pred,
            "config_gap_fraction": (cfg_pred - measured) / measured,
        })

    sweep = np.linspace(0.0, CALIBRATION_MEASUREMENTS[-1][0], 76)
    forces = np.array([predict(d, k) for d in sweep])
    trace_path = write_trace(_quasi_static_trace(sweep, forces, u_cal),
                             out_dir / "calibrate.csv")
    summary = {
        "experiment": "calibrate",
        "fitted_k": k,
        "config_k": cfg.calibration.mixing_parameter,
        "calibration_voltage_kv": u_cal,
        "stack_count": CALIBRATION_STACK.actuator_count,
        "convention": CALIBRATION_STACK.convention.value,
        "points": points,
        "files": [trace_path.name],
    }
    _write_summary(summary, out_dir, "calibrate")
    return summary


def run_force_curve(cfg: ExperimentConfig, out_dir: Path) -> dict:
    params = cfg.experiments.force_curve
    sweep = np.linspace(0.0, params.displacement_max, params.points)
    files = []
    max_forces = {}
    for voltage in params.voltages:
        forces = np.array([
            stack_force(CALIBRATION_STACK, cfg.actuator, cfg.calibration, d, voltage)
            for d in sweep
        ])
        path = write_trace(_quasi_static_trace(sweep, forces, voltage),
                           out_dir / f"force_curve_{voltage:g}kV.csv")
        files.append(path.name)
        max_forces[f"{voltage:g}"] = float(forces[-1])
    comparison = []
    for displacement, measured in CALIBRATION_MEASUREMENTS:
        predicted = stack_force(CALIBRATION_STACK, cfg.actuator, cfg.calibration,
                                displacement, cfg.calibration.calibration_voltage)
        comparison.append({
            "displacement_mm": displacement,
            "measured_force_n": measured,
            "predicted_force_n": predicted,
            "gap_fraction": (predicted - measured) / measured,
        })
    summary = {
        "experiment": "force-curve",
        "voltages_kv": list(params.voltages),
        "displacement_max_mm": params.displacement_max,
        "max_force_n": max_forces,
        "comparison_at_calibration_voltage": comparison,
        "files": files,
    }
    _write_summary(summary, out_dir, "force_curve")
    return summary


def run_max_force(cfg: ExperimentConfig, out_dir: Path) -> dict:
    params = cfg.experiments.max_force
    dev = cfg.device(convention=params.stack_convention)
    sweep = np.linspace(0.0, cfg.mechanism.max_pinch_stroke, params.points)
    forces = np.array([static_force_map(dev, p, params.voltage) for p in sweep])
    path = write_trace(_quasi_static_trace(sweep, forces, params.voltage),
                       out_dir / "max_force.csv")
    summary = {
        "experiment": "max-force",
        "voltage_kv": params.voltage,
        "stroke_mm": cfg.mechanism.max_pinch_stroke,
        "convention": params.stack_convention.value,
        "preload_mm": cfg.stack.preload_displacement,
        "force_at_zero_pinch_n": float(forces[0]),
        "max_force_n": float(forces.max()),
        "reference_envelope_n": list(REFERENCE_MAX_FORCE_ENVELOPE),
        "files": [path.name],
    }
    _write_summary(summary, out_dir, "max_force")
    return summary


def run_step_response(cfg: ExperimentConfig, out_dir: Path,
                      duration: Optional[float] = None) -> dict:
    params = cfg.experiments.step_response
    dev = cfg.device()
    trace = simulate_step_response(dev, cfg.plant, params.voltage, params.displacement,
                                   duration or params.duration)
    path = write_trace(trace, out_dir / "step_response.csv")
    summary = {
        "experiment": "step-response",
        "voltage_kv": params.voltage,
        "displacement_mm": params.displacement,
        "rise_time_ms": measure_rise_time(trace),
        "static_target_n": float(trace.target_force[0]),
        "final_force_n": float(trace.actual_force[-1]),
        "files": [path.name],
    }
    _write_summary(summary, out_dir, "step_response")
    return summary


def steady_window_start(duration_ms: float, period_ms: float) -> float:
    """First full target period is treated as transient."""
    return min(period_ms, duration_ms / 2.0)


def run_track(cfg: ExperimentConfig, out_dir: Path,
              duration: Optional[float] = None) -> dict:
    params = cfg.experiments.track
    dev = cfg.device()
    duration = duration or params.duration
    trace = simulate_tracking(dev, cfg.plant, cfg.controller, params.target,
                              params.displacement, duration)
    path = write_trace(trace, out_dir / "track.csv")
    start = steady_window_start(duration, 1000.0 / params.target.frequency)
    steady = trace.t >= start
    err = trace.target_force[steady] - trace.actual_force[steady]
    rms = float(np.sqrt(np.mean(err**2)))
    summary = {
        "experiment": "track",
        "target": {
            "shape": params.target.shape.value,
            "frequency_hz": params.target.frequency,
            "amplitude_n": params.target.amplitude,
            "offset_n": params.target.offset,
        },
        "displacement_mm": params.displacement,
        "duration_ms": duration,
        "steady_start_ms": start,
        "rms_error_n": rms,
        "rms_error_fraction_of_amplitude":
            rms / params.target.amplitude if params.target.amplitude > 0 else None,
        "max_steady_error_n": float(np.abs(err).max()),
        "files": [path.name],
    }
    _write_summary(summary, out_dir, "track")
    return summary


def run_vibrate(cfg: ExperimentConfig, out_dir: Path,
                duration: Optional[float] = None) -> dict:
    params = cfg.experiments.vibrate
    dev = cfg.device()
    trace = simulate_vibration(dev, cfg.plant, cfg.waveform, params.displacement,
                               duration or params.duration)
    path = write_trace(trace, out_dir / "vibrate.csv")
    ripple = ripple_analysis(trace, params.band)
    overlay = None
    if cfg.waveform.overlay is not None:
        overlay = {
            "frequency_hz": cfg.waveform.overlay.frequency,
            "amplitude_kv": cfg.waveform.overlay.amplitude,
        }
    summary = {
        "experiment": "vibrate",
        "square": {
            "frequency_hz": cfg.waveform.square.frequency,
            "amplitude_kv": cfg.waveform.square.amplitude,
        },
        "overlay": overlay,
        "displacement_mm": params.displacement,
        "band_hz": list(params.band),
        "ripple_frequency_hz": ripple.frequency,
        "ripple_amplitude_n": ripple.amplitude,
        "files": [path.name],
    }
    _write_summary(summary, out_dir, "vibrate")
    return summary


def run_teleop_demo(cfg: ExperimentConfig, out_dir: Path,
                    duration: Optional[float] = None,
                    seed: Optional[int] = None) -> dict:
    params = cfg.experiments.teleop_demo
    duration = duration or params.duration
    seed = cfg.seed if seed is None else seed
    if params.object_label is None:
        objects = cfg.teleop.objects
    else:
        objects = (cfg.find_object(params.object_label),)
    script = PinchScript.ramp_hold(params.target_pinch, params.ramp)
    files = []
    results = []
    for obj in objects:
        session = SessionConfig(
            device=cfg.device(),
            plant=cfg.plant,
            gains=cfg.controller,
            slave=cfg.teleop.slave,
            channel=cfg.teleop.channel,
            obj=obj,
            stale_timeout_ms=cfg.teleop.stale_timeout,
            seed=seed,
        )
        trace = run_session(session, script, duration)
        path = write_trace(trace, out_dir / f"teleop_demo_{obj.label}.csv")
        files.append(path.name)
        tail = trace.t >= 0.8 * duration
        results.append({
            "object": obj.label,
            "steady_master_force_n": float(trace.actual_force[tail].mean()),
            "steady_slave_force_n": float(trace.slave_force[tail].mean()),
            "final_slave_position_mm": float(trace.slave_position[-1]),
            "mean_latency_ms": float(trace.latency[tail].mean()),
        })
    summary = {
        "experiment": "teleop-demo",
        "duration_ms": duration,
        "seed": seed,
        "target_pinch_mm": params.target_pinch,
        "objects": results,
        "stiffness_order": [r["object"] for r in
                            sorted(results, key=lambda r: r["steady_master_force_n"])],
        "files": files,
    }
    _write_summary(summary, out_dir, "teleop_demo")
    return summary


_RUNNERS: dict[str, Callable] = {
    "calibrate": run_calibrate,
    "force-curve": run_force_curve,
    "max-force": run_max_force,
    "step-response": run_step_response,
    "track": run_track,
    "vibrate": run_vibrate,
    "teleop-demo": run_teleop_demo,
}

EXPERIMENT_NAMES = tuple(_RUNNERS)


def run_experiment(
    name: str,
    cfg: ExperimentConfig,
    out_dir: Union[str, Path],
    duration: Optional[float] = None,
    seed: Optional[int] = None,
) -> dict:
    """Dispatch one named experiment; returns its summary dict.

    ``duration`` (ms) overrides the experiment's configured duration where
    one applies; ``seed`` overrides the config seed for seeded runs.
    """
    if name not in _RUNNERS:
        raise SimError(f"unknown experiment {name!r}; expected one of {', '.join(_RUNNERS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = _RUNNERS[name]
    try:
        if name == "teleop-demo":
            return runner(cfg, out_dir, duration=duration, seed=seed)
        if name in ("step-response", "track", "vibrate"):
            return runner(cfg, out_dir, duration=duration)
        return runner(cfg, out_dir)
    except SimError as e:
        raise SimError(f"experiment {name!r}: {e}") from e
