"""Statics of the pinch mechanism that wraps the actuator stacks.

The user pinches a vertically sliding platform; two connecting rods of
length R couple it to horizontally sliding squeeze plates, one per side,
each pressing on a stack of actuators.  A vertical pinch displacement
``pinch`` advances each plate by ``plate_displacement`` and tilts the rods
to ``rod_angle``; the actuator feedback force returns to the finger
through the rods, scaled by the sine projections of the rod geometry.

The force projection is implemented exactly as the source model states it
(F_rod = F sin(theta), F_user = 2 F_rod sin(theta)); rails and bearings
are treated as ideal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .actuator import ActuatorGeometry, CalibrationParams, StackConfig, stack_force
from .errors import DomainError, GeometryError


@dataclass(frozen=True)
class MechanismGeometry:
    """Pinch mechanism dimensions, all mm.

    ``vertical_offset`` is the vertical distance between the pinch plate's
    initial position and the horizontal line through the rod's lower end;
    it bounds the geometric stroke.
    """

    rod_length: float = 35.0
    vertical_offset: float = 15.0
    max_pinch_stroke: float = 15.0

    def __post_init__(self):
        if not (0.0 < self.vertical_offset <= self.rod_length):
            raise GeometryError(
                f"vertical_offset must lie in (0, rod_length], got {self.vertical_offset!r} "
                f"with rod_length {self.rod_length!r}"
            )
        if not (0.0 < self.max_pinch_stroke <= self.vertical_offset):
            raise GeometryError(
                f"max_pinch_stroke must lie in (0, vertical_offset], got {self.max_pinch_stroke!r}"
            )


def _check_pinch(g: MechanismGeometry, pinch: float):
    if not math.isfinite(pinch) or pinch < 0.0:
        raise DomainError(f"pinch displacement must be >= 0, got {pinch!r}")
    if pinch > g.vertical_offset:
        raise DomainError(
            f"pinch displacement {pinch:g} mm exceeds the vertical offset {g.vertical_offset:g} mm"
        )


def plate_displacement(g: MechanismGeometry, pinch: float) -> float:
    """Horizontal squeeze-plate displacement for a vertical pinch, mm.

    dx = sqrt(R^2 - (L - pinch)^2) - sqrt(R^2 - L^2); zero at rest and
    strictly increasing over [0, L].
    """
    _check_pinch(g, pinch)
    r_sq = g.rod_length * g.rod_length
    rem = g.vertical_offset - pinch
    arg = r_sq - rem * rem
    if arg < 0.0:
        raise DomainError("rod cannot span the commanded pinch displacement")
    return math.sqrt(arg) - math.sqrt(r_sq - g.vertical_offset * g.vertical_offset)


def rod_angle(g: MechanismGeometry, pinch: float) -> float:
    """Rod angle from horizontal, rad: theta = arcsin((L - pinch) / R)."""
    _check_pinch(g, pinch)
    return math.asin((g.vertical_offset - pinch) / g.rod_length)


def rod_force(actuator_force: float, theta: float) -> float:
    """Force component along one connecting rod, N."""
    return actuator_force * math.sin(theta)


def user_force(actuator_force: float, theta: float) -> float:
    """Vertical force felt at the finger, N: both rods combined.

    F_user = 2 F_rod sin(theta) = 2 F sin^2(theta).
    """
    s = math.sin(theta)
    return 2.0 * actuator_force * s * s


@dataclass(frozen=True)
class DeviceConfig:
    """One complete device: mechanism plus symmetric actuator sides.

    ``stack`` describes one side; the left and right sides are identical by
    construction (the hardware is symmetric), so a single per-side stack is
    stored and the factor for both rods lives in :func:`user_force`.
    """

    geometry: MechanismGeometry = field(default_factory=MechanismGeometry)
    actuator: ActuatorGeometry = field(default_factory=ActuatorGeometry)
    calibration: CalibrationParams = field(default_factory=CalibrationParams)
    stack: StackConfig = field(default_factory=StackConfig)


def device_static_force(dev: DeviceConfig, pinch: float, voltage: float) -> float:
    """Static finger force at a pinch displacement and drive voltage, N.

    Composition: pinch -> plate displacement -> per-side stack force at
    (preload + plate displacement) -> rod angle -> user force.  Domain
    errors are re-raised with the failing stage named.
    """
    if pinch > dev.geometry.max_pinch_stroke:
        raise DomainError(
            f"pinch {pinch:g} mm exceeds the device stroke {dev.geometry.max_pinch_stroke:g} mm"
        )
    try:
        dx_plate = plate_displacement(dev.geometry, pinch)
        theta = rod_angle(dev.geometry, pinch)
    except DomainError as e:
        raise DomainError(f"mechanism stage: {e}") from e
    try:
        f_actuator = stack_force(
            dev.stack,
            dev.actuator,
            dev.calibration,
            dev.stack.preload_displacement + dx_plate,
            voltage,
        )
    except DomainError as e:
        raise DomainError(f"actuator stage: {e}") from e
    return user_force(f_actuator, theta)
