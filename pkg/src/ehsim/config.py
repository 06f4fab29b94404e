"""JSON experiment configuration: schema, defaults, validation, round-trip.

A config file is a single JSON object with optional sections ``actuator``,
``mechanism``, ``plant``, ``controller``, ``waveform``, ``teleop``,
``experiments`` and a ``seed``.  Absent keys take the documented defaults;
unknown keys are rejected.  Validation errors name the offending field by
its dotted path.  All lengths are mm, forces N, voltages kV, times ms
(waveform frequencies Hz, slew rate kV/ms).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .actuator import (
    ActuatorGeometry,
    CalibrationParams,
    DisplacementConvention,
    StackConfig,
)
from .control import PiGains, PlantParams, TargetShape, TargetSpec
from .errors import ConfigError, SimError
from .mechanism import DeviceConfig, MechanismGeometry
from .teleop.session import ChannelParams, SlaveParams, VirtualObject
from .waveform import CompositeWaveform, SineOverlay, SquareWaveSpec


@dataclass(frozen=True)
class ForceCurveParams:
    voltages: tuple[float, ...] = (4.0, 5.0, 6.0)
    displacement_max: float = 0.5   # mm of stack squeeze
    points: int = 101


@dataclass(frozen=True)
class MaxForceParams:
    voltage: float = 6.0
    points: int = 151
    # The full 15 mm stroke only stays inside the actuator domain when the
    # squeeze is shared across the stack, so this experiment defaults to
    # the per-actuator convention regardless of the device-level setting.
    stack_convention: DisplacementConvention = DisplacementConvention.PER_ACTUATOR_SHARE


@dataclass(frozen=True)
class StepResponseParams:
    voltage: float = 6.0
    displacement: float = 3.0
    duration: float = 400.0


@dataclass(frozen=True)
class TrackParams:
    target: TargetSpec = field(default_factory=TargetSpec)
    displacement: float = 3.0
    duration: float = 25000.0


@dataclass(frozen=True)
class VibrateParams:
    displacement: float = 3.0
    # Ripple analysis needs 5 periods of the band low edge; 8 s against the
    # 1 Hz edge leaves margin and a finer frequency grid.
    duration: float = 8000.0
    band: tuple[float, float] = (1.0, 30.0)


@dataclass(frozen=True)
class TeleopDemoParams:
    object_label: Optional[str] = None   # None = run every configured object
    target_pinch: float = 4.0
    ramp: float = 500.0
    duration: float = 6000.0


@dataclass(frozen=True)
class ExperimentParams:
    force_curve: ForceCurveParams = field(default_factory=ForceCurveParams)
    max_force: MaxForceParams = field(default_factory=MaxForceParams)
    step_response: StepResponseParams = field(default_factory=StepResponseParams)
    track: TrackParams = field(default_factory=TrackParams)
    vibrate: VibrateParams = field(default_factory=VibrateParams)
    teleop_demo: TeleopDemoParams = field(default_factory=TeleopDemoParams)


DEFAULT_OBJECTS = (
    VirtualObject("spring_light", contact_position=1.0, linear_stiffness=0.3),
    VirtualObject("spring_heavy", contact_position=1.0, linear_stiffness=0.5),
    VirtualObject("hose_soft", contact_position=1.0, linear_stiffness=0.1),
    VirtualObject("hose_stiffening", contact_position=1.0, linear_stiffness=0.1,
                  cubic_stiffness=0.02),
)


@dataclass(frozen=True)
class TeleopSettings:
    slave: SlaveParams = field(default_factory=SlaveParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    stale_timeout: float = 50.0
    objects: tuple[VirtualObject, ...] = DEFAULT_OBJECTS


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated configuration for every experiment runner."""

    seed: int = 0
    actuator: ActuatorGeometry = field(default_factory=ActuatorGeometry)
    calibration: CalibrationParams = field(default_factory=CalibrationParams)
    stack: StackConfig = field(default_factory=lambda: StackConfig(
        actuator_count=30,
        convention=DisplacementConvention.TOTAL_AS_DELTA_H,
        preload_displacement=0.05,
    ))
    mechanism: MechanismGeometry = field(default_factory=MechanismGeometry)
    plant: PlantParams = field(default_factory=PlantParams)
    controller: PiGains = field(default_factory=PiGains)
    waveform: CompositeWaveform = field(default_factory=lambda: CompositeWaveform(
        square=SquareWaveSpec(),
        overlay=SineOverlay(frequency=5.0, amplitude=2.5),
    ))
    teleop: TeleopSettings = field(default_factory=TeleopSettings)
    experiments: ExperimentParams = field(default_factory=ExperimentParams)

    def device(self, convention: Optional[DisplacementConvention] = None) -> DeviceConfig:
        """Build the device model, optionally overriding the stack convention."""
        stack = self.stack
        if convention is not None and convention is not stack.convention:
            stack = StackConfig(
                actuator_count=stack.actuator_count,
                convention=convention,
                preload_displacement=stack.preload_displacement,
            )
        return DeviceConfig(
            geometry=self.mechanism,
            actuator=self.actuator,
            calibration=self.calibration,
            stack=stack,
        )

    def find_object(self, label: str) -> VirtualObject:
        for obj in self.teleop.objects:
            if obj.label == label:
                return obj
        raise ConfigError("teleop.objects", f"no object labeled {label!r}")


class _Reader:
    """Pops known keys off a raw JSON mapping with typed checks."""

    def __init__(self, raw, path: str):
        if not isinstance(raw, dict):
            raise ConfigError(path, f"expected an object, got {type(raw).__name__}")
        self.raw = dict(raw)
        self.path = path

    def _key(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def number(self, key, default, minimum=None, exclusive_min=False, allow_inf=False):
        if key not in self.raw:
            return default
        value = self.raw.pop(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(self._key(key), f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value) and not (allow_inf and value == math.inf):
            raise ConfigError(self._key(key), f"must be finite, got {value!r}")
        if minimum is not None:
            if exclusive_min and not value > minimum:
                raise ConfigError(self._key(key), f"must be > {minimum}, got {value!r}")
            if not exclusive_min and not value >= minimum:
                raise ConfigError(self._key(key), f"must be >= {minimum}, got {value!r}")
        return value

    def integer(self, key, default, minimum=0):
        if key not in self.raw:
            return default
        value = self.raw.pop(key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(self._key(key), f"expected an integer, got {value!r}")
        if value < minimum:
            raise ConfigError(self._key(key), f"must be >= {minimum}, got {value!r}")
        return value

    def choice(self, key, default, choices):
        if key not in self.raw:
            return default
        value = self.raw.pop(key)
        if value not in choices:
            raise ConfigError(self._key(key), f"must be one of {sorted(choices)}, got {value!r}")
        return value

    def string(self, key, default):
        if key not in self.raw:
            return default
        value = self.raw.pop(key)
        if not isinstance(value, str):
            raise ConfigError(self._key(key), f"expected a string, got {value!r}")
        return value

    def section(self, key):
        value = self.raw.pop(key, None)
        if value is None:
            return None
        if not isinstance(value, dict):
            raise ConfigError(self._key(key), f"expected an object, got {value!r}")
        return value

    def list_of(self, key, default):
        if key not in self.raw:
            return default
        value = self.raw.pop(key)
        if not isinstance(value, list):
            raise ConfigError(self._key(key), f"expected a list, got {value!r}")
        return value

    def finish(self):
        if self.raw:
            key = sorted(self.raw)[0]
            raise ConfigError(self._key(key), "unknown key")


def _build(path: str, ctor, **kwargs):
    """Construct a domain dataclass, converting invariant failures to ConfigError."""
    try:
        return ctor(**kwargs)
    except SimError as e:
        raise ConfigError(path, str(e)) from e


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a raw JSON mapping into an ExperimentConfig."""
    top = _Reader(raw, "")
    seed = top.integer("seed", 0, minimum=0)
    if seed >= 1 << 64:
        raise ConfigError("seed", "must fit in 64 bits")

    defaults = ExperimentConfig()

    r = _Reader(top.section("actuator") or {}, "actuator")
    geom = _build(
        "actuator", ActuatorGeometry,
        oil_volume=r.number("oil_volume", defaults.actuator.oil_volume, 0.0, exclusive_min=True),
        bladder_width=r.number("bladder_width", defaults.actuator.bladder_width, 0.0, exclusive_min=True),
        bladder_length=r.number("bladder_length", defaults.actuator.bladder_length, 0.0, exclusive_min=True),
    )
    cal = _build(
        "actuator", CalibrationParams,
        mixing_parameter=r.number("mixing_parameter", defaults.calibration.mixing_parameter,
                                  0.0, exclusive_min=True),
        calibration_voltage=r.number("calibration_voltage", defaults.calibration.calibration_voltage,
                                     0.0, exclusive_min=True),
    )
    stack = _build(
        "actuator", StackConfig,
        actuator_count=r.integer("stack_count", defaults.stack.actuator_count, minimum=1),
        convention=DisplacementConvention(
            r.choice("stack_convention", defaults.stack.convention.value,
                     {c.value for c in DisplacementConvention})),
        preload_displacement=r.number("preload", defaults.stack.preload_displacement, 0.0),
    )
    r.finish()

    r = _Reader(top.section("mechanism") or {}, "mechanism")
    mech = _build(
        "mechanism", MechanismGeometry,
        rod_length=r.number("rod_length", defaults.mechanism.rod_length, 0.0, exclusive_min=True),
        vertical_offset=r.number("vertical_offset", defaults.mechanism.vertical_offset,
                                 0.0, exclusive_min=True),
        max_pinch_stroke=r.number("max_pinch_stroke", defaults.mechanism.max_pinch_stroke,
                                  0.0, exclusive_min=True),
    )
    r.finish()

    r = _Reader(top.section("plant") or {}, "plant")
    plant = _build(
        "plant", PlantParams,
        time_constant=r.number("time_constant", defaults.plant.time_constant, 0.0, exclusive_min=True),
        sample_period=r.number("sample_period", defaults.plant.sample_period, 0.0, exclusive_min=True),
    )
    r.finish()

    r = _Reader(top.section("controller") or {}, "controller")
    gains = _build(
        "controller", PiGains,
        kp=r.number("kp", defaults.controller.kp, 0.0),
        ki=r.number("ki", defaults.controller.ki, 0.0),
        output_min=r.number("output_min", defaults.controller.output_min, 0.0),
        output_max=r.number("output_max", defaults.controller.output_max, 0.0, exclusive_min=True),
    )
    r.finish()

    r = _Reader(top.section("waveform") or {}, "waveform")
    default_square = defaults.waveform.square
    sq_raw = r.section("square")
    sr = _Reader(sq_raw or {}, "waveform.square")
    square = _build(
        "waveform.square", SquareWaveSpec,
        frequency=sr.number("frequency", default_square.frequency, 0.0, exclusive_min=True),
        amplitude=sr.number("amplitude", default_square.amplitude, 0.0),
        slew_rate=sr.number("slew_rate", default_square.slew_rate, 0.0,
                            exclusive_min=True, allow_inf=True),
    )
    sr.finish()
    overlay = defaults.waveform.overlay
    if "overlay" in r.raw:
        ov_raw = r.raw.pop("overlay")
        if ov_raw is None:
            overlay = None
        else:
            orr = _Reader(ov_raw, "waveform.overlay")
            overlay = _build(
                "waveform.overlay", SineOverlay,
                frequency=orr.number("frequency", 5.0, 0.0, exclusive_min=True),
                amplitude=orr.number("amplitude", 2.5, 0.0),
                phase=orr.number("phase", 0.0),
            )
            orr.finish()
    wave = _build(
        "waveform", CompositeWaveform,
        square=square,
        overlay=overlay,
        breakdown_limit=r.number("breakdown_limit", defaults.waveform.breakdown_limit,
                                 0.0, exclusive_min=True),
    )
    r.finish()

    r = _Reader(top.section("teleop") or {}, "teleop")
    sl = _Reader(r.section("slave") or {}, "teleop.slave")
    slave = _build(
        "teleop.slave", SlaveParams,
        max_speed=sl.number("max_speed", 30.0, 0.0, exclusive_min=True),
        position_step=sl.number("position_step", 0.01, 0.0, exclusive_min=True),
        contact_threshold=sl.number("contact_threshold", 0.02, 0.0, exclusive_min=True),
    )
    sl.finish()
    ch = _Reader(r.section("channel") or {}, "teleop.channel")
    channel = _build(
        "teleop.channel", ChannelParams,
        base_latency=ch.number("base_latency", 0.0, 0.0),
        jitter=ch.number("jitter", 0.0, 0.0),
    )
    ch.finish()
    stale_timeout = r.number("stale_timeout", 50.0, 0.0, exclusive_min=True)
    objects = []
    raw_objects = r.list_of("objects", None)
    if raw_objects is None:
        objects = list(DEFAULT_OBJECTS)
    else:
        if not raw_objects:
            raise ConfigError("teleop.objects", "at least one object is required")
        for i, raw_obj in enumerate(raw_objects):
            orr = _Reader(raw_obj, f"teleop.objects[{i}]")
            label = orr.string("label", f"object_{i}")
            objects.append(_build(
                f"teleop.objects[{i}]", VirtualObject,
                label=label,
                contact_position=orr.number("contact_position", 1.0, 0.0),
                linear_stiffness=orr.number("linear_stiffness", 0.3, 0.0),
                cubic_stiffness=orr.number("cubic_stiffness", 0.0, 0.0),
            ))
            orr.finish()
        labels = [o.label for o in objects]
        if len(set(labels)) != len(labels):
            raise ConfigError("teleop.objects", "object labels must be unique")
    teleop = TeleopSettings(slave=slave, channel=channel, stale_timeout=stale_timeout,
                            objects=tuple(objects))
    r.finish()

    r = _Reader(top.section("experiments") or {}, "experiments")
    de = defaults.experiments

    fc = _Reader(r.section("force_curve") or {}, "experiments.force_curve")
    voltages = fc.list_of("voltages", list(de.force_curve.voltages))
    for i, v in enumerate(voltages):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0 <= v:
            raise ConfigError(f"experiments.force_curve.voltages[{i}]",
                              f"expected a number >= 0, got {v!r}")
    force_curve = ForceCurveParams(
        voltages=tuple(float(v) for v in voltages),
        displacement_max=fc.number("displacement_max", de.force_curve.displacement_max,
                                   0.0, exclusive_min=True),
        points=fc.integer("points", de.force_curve.points, minimum=2),
    )
    fc.finish()

    mf = _Reader(r.section("max_force") or {}, "experiments.max_force")
    max_force = MaxForceParams(
        voltage=mf.number("voltage", de.max_force.voltage, 0.0),
        points=mf.integer("points", de.max_force.points, minimum=2),
        stack_convention=DisplacementConvention(
            mf.choice("stack_convention", de.max_force.stack_convention.value,
                      {c.value for c in DisplacementConvention})),
    )
    mf.finish()

    st = _Reader(r.section("step_response") or {}, "experiments.step_response")
    step_response = StepResponseParams(
        voltage=st.number("voltage", de.step_response.voltage, 0.0),
        displacement=st.number("displacement", de.step_response.displacement, 0.0),
        duration=st.number("duration", de.step_response.duration, 0.0, exclusive_min=True),
    )
    st.finish()

    tr = _Reader(r.section("track") or {}, "experiments.track")
    target = _build(
        "experiments.track", TargetSpec,
        shape=TargetShape(tr.choice("shape", de.track.target.shape.value,
                                    {s.value for s in TargetShape})),
        frequency=tr.number("frequency", de.track.target.frequency, 0.0, exclusive_min=True),
        amplitude=tr.number("amplitude", de.track.target.amplitude, 0.0),
        offset=tr.number("offset", de.track.target.offset),
    )
    track = TrackParams(
        target=target,
        displacement=tr.number("displacement", de.track.displacement, 0.0),
        duration=tr.number("duration", de.track.duration, 0.0, exclusive_min=True),
    )
    tr.finish()

    vb = _Reader(r.section("vibrate") or {}, "experiments.vibrate")
    band_raw = vb.list_of("band", list(de.vibrate.band))
    if len(band_raw) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                     for v in band_raw) or not 0 < band_raw[0] < band_raw[1]:
        raise ConfigError("experiments.vibrate.band", f"expected [low, high] with 0 < low < high, got {band_raw!r}")
    vibrate = VibrateParams(
        displacement=vb.number("displacement", de.vibrate.displacement, 0.0),
        duration=vb.number("duration", de.vibrate.duration, 0.0, exclusive_min=True),
        band=(float(band_raw[0]), float(band_raw[1])),
    )
    vb.finish()

    td = _Reader(r.section("teleop_demo") or {}, "experiments.teleop_demo")
    demo_label = td.string("object", de.teleop_demo.object_label or "")
    teleop_demo = TeleopDemoParams(
        object_label=demo_label or None,
        target_pinch=td.number("target_pinch", de.teleop_demo.target_pinch, 0.0, exclusive_min=True),
        ramp=td.number("ramp", de.teleop_demo.ramp, 0.0, exclusive_min=True),
        duration=td.number("duration", de.teleop_demo.duration, 0.0, exclusive_min=True),
    )
    td.finish()
    r.finish()
    top.finish()

    cfg = ExperimentConfig(
        seed=seed,
        actuator=geom,
        calibration=cal,
        stack=stack,
        mechanism=mech,
        plant=plant,
        controller=gains,
        waveform=wave,
        teleop=teleop,
        experiments=ExperimentParams(
            force_curve=force_curve,
            max_force=max_force,
            step_response=step_response,
            track=track,
            vibrate=vibrate,
            teleop_demo=teleop_demo,
        ),
    )
    if teleop_demo.object_label is not None:
        cfg.find_object(teleop_demo.object_label)
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Serialize a config back to its canonical JSON mapping."""
    overlay = None
    if cfg.waveform.overlay is not None:
        ov = cfg.waveform.overlay
        overlay = {"frequency": ov.frequency, "amplitude": ov.amplitude, "phase": ov.phase}
    return {
        "seed": cfg.seed,
        "actuator": {
            "oil_volume": cfg.actuator.oil_volume,
            "bladder_width": cfg.actuator.bladder_width,
            "bladder_length": cfg.actuator.bladder_length,
            "mixing_parameter": cfg.calibration.mixing_parameter,
            "calibration_voltage": cfg.calibration.calibration_voltage,
            "stack_count": cfg.stack.actuator_count,
            "stack_convention": cfg.stack.convention.value,
            "preload": cfg.stack.preload_displacement,
        },
        "mechanism": {
            "rod_length": cfg.mechanism.rod_length,
            "vertical_offset": cfg.mechanism.vertical_offset,
            "max_pinch_stroke": cfg.mechanism.max_pinch_stroke,
        },
        "plant": {
            "time_constant": cfg.plant.time_constant,
            "sample_period": cfg.plant.sample_period,
        },
        "controller": {
            "kp": cfg.controller.kp,
            "ki": cfg.controller.ki,
            "output_min": cfg.controller.output_min,
            "output_max": cfg.controller.output_max,
        },
        "waveform": {
            "square": {
                "frequency": cfg.waveform.square.frequency,
                "amplitude": cfg.waveform.square.amplitude,
                "slew_rate": cfg.waveform.square.slew_rate,
            },
            "overlay": overlay,
            "breakdown_limit": cfg.waveform.breakdown_limit,
        },
        "teleop": {
            "slave": {
                "max_speed": cfg.teleop.slave.max_speed,
                "position_step": cfg.teleop.slave.position_step,
                "contact_threshold": cfg.teleop.slave.contact_threshold,
            },
            "channel": {
                "base_latency": cfg.teleop.channel.base_latency,
                "jitter": cfg.teleop.channel.jitter,
            },
            "stale_timeout": cfg.teleop.stale_timeout,
            "objects": [
                {
                    "label": o.label,
                    "contact_position": o.contact_position,
                    "linear_stiffness": o.linear_stiffness,
                    "cubic_stiffness": o.cubic_stiffness,
                }
                for o in cfg.teleop.objects
            ],
        },
        "experiments": {
            "force_curve": {
                "voltages": list(cfg.experiments.force_curve.voltages),
                "displacement_max": cfg.experiments.force_curve.displacement_max,
                "points": cfg.experiments.force_curve.points,
            },
            "max_force": {
                "voltage": cfg.experiments.max_force.voltage,
                "points": cfg.experiments.max_force.points,
                "stack_convention": cfg.experiments.max_force.stack_convention.value,
            },
            "step_response": {
                "voltage": cfg.experiments.step_response.voltage,
                "displacement": cfg.experiments.step_response.displacement,
                "duration": cfg.experiments.step_response.duration,
            },
            "track": {
                "shape": cfg.experiments.track.target.shape.value,
                "frequency": cfg.experiments.track.target.frequency,
                "amplitude": cfg.experiments.track.target.amplitude,
                "offset": cfg.experiments.track.target.offset,
                "displacement": cfg.experiments.track.displacement,
                "duration": cfg.experiments.track.duration,
            },
            "vibrate": {
                "displacement": cfg.experiments.vibrate.displacement,
                "duration": cfg.experiments.vibrate.duration,
                "band": list(cfg.experiments.vibrate.band),
            },
            "teleop_demo": {
                "object": cfg.experiments.teleop_demo.object_label or "",
                "target_pinch": cfg.experiments.teleop_demo.target_pinch,
                "ramp": cfg.experiments.teleop_demo.ramp,
                "duration": cfg.experiments.teleop_demo.duration,
            },
        },
    }


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Load and validate a JSON config file."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("<json>", f"parse error at line {e.lineno} column {e.colno}: {e.msg}") from e
    return config_from_dict(raw)


def save_config(cfg: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
    return path


def default_config() -> ExperimentConfig:
    return ExperimentConfig()
