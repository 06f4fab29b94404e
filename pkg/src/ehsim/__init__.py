"""Simulator for a kinesthetic haptic device driven by soft electrohydraulic actuators.

Subpackages and modules:

- :mod:`ehsim.actuator` -- static squeeze-force model of one actuator or stack
- :mod:`ehsim.mechanism` -- pinch mechanism statics and the full device map
- :mod:`ehsim.waveform` -- drive waveform synthesis and breakdown validation
- :mod:`ehsim.control` -- first-order force plant, discrete PI, simulations
- :mod:`ehsim.teleop` -- wire protocol, channel model, bilateral sessions
- :mod:`ehsim.config` / :mod:`ehsim.experiments` / :mod:`ehsim.cli` -- harness
"""

from .actuator import (
    ActuatorGeometry,
    CalibrationParams,
    DielectricParams,
    DisplacementConvention,
    SqueezeState,
    StackConfig,
    calibrate_k,
    expanded_half_height,
    lateral_advance,
    maxwell_force_explicit,
    maxwell_pressure,
    single_actuator_force,
    squeeze_state,
    squeezed_area,
    stack_force,
    wedge_angle,
)
from .config import ExperimentConfig, default_config, load_config
from .control import (
    ControllerState,
    PiGains,
    PlantParams,
    RippleResult,
    TargetShape,
    TargetSpec,
    exact_plant_step,
    measure_rise_time,
    pi_step,
    plant_step,
    ripple_analysis,
    simulate_step_response,
    simulate_tracking,
    simulate_vibration,
    static_force_map,
)
from .errors import SimError
from .experiments import run_experiment
from .mechanism import (
    DeviceConfig,
    MechanismGeometry,
    device_static_force,
    plate_displacement,
    rod_angle,
    rod_force,
    user_force,
)
from .trace import SessionTrace, SimTrace, read_trace, write_trace
from .waveform import (
    CompositeWaveform,
    SineOverlay,
    SquareWaveSpec,
    common_period,
    peak_voltage,
    sample_voltage,
    validate_waveform,
)

__version__ = "0.1.0"
