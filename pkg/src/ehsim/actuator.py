"""Static squeeze-force model of a soft electrohydraulic actuator.

A single actuator is a rectangular dielectric-oil bladder whose cross
section is treated as a centrosymmetric rhombus.  Squeezing the bladder
vertically by ``delta_h`` pushes oil sideways (the oil is incompressible),
which grows the electrode-facing squeezed surface; electrostatic pressure
on that surface produces the vertical feedback force.

Canonical units throughout: mm for lengths, mm^2/mm^3 for areas/volumes,
kV for drive voltage, N for force, N/mm^2 for pressure.  The electrostatic
pressure is lumped into a single mixing parameter K (N mm^-2 kV^-2) that
absorbs the unknown residual oil thickness between the electrodes; the
explicit permittivity form is provided for completeness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import CalibrationError, DomainError, GeometryError, MissingParameterError

# F/m (SI); only used by the explicit permittivity form.
VACUUM_PERMITTIVITY = 8.8541878128e-12

# Default mixing parameter for the standard bladder, N mm^-2 kV^-2.
DEFAULT_MIXING_PARAMETER = 9.828e-5

# Drive level used for the bundled calibration measurements, kV.
DEFAULT_CALIBRATION_VOLTAGE = 6.0


@dataclass(frozen=True)
class ActuatorGeometry:
    """Resting bladder geometry.

    Attributes
    ----------
    oil_volume : float
        Total dielectric oil volume, mm^3.
    bladder_width : float
        Width of one lateral bladder lobe, mm.
    bladder_length : float
        Bladder length along the electrode, mm.
    """

    oil_volume: float = 2500.0
    bladder_width: float = 12.5
    bladder_length: float = 50.0

    def __post_init__(self):
        for name in ("oil_volume", "bladder_width", "bladder_length"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise GeometryError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def half_height(self) -> float:
        """Half-height h of the expanded bladder, mm: h = V / (2 x L)."""
        return self.oil_volume / (2.0 * self.bladder_width * self.bladder_length)

    @property
    def wedge_angle(self) -> float:
        """Wedge angle of the rhombic cross section, rad, in (0, pi/2)."""
        return math.atan(2.0 * self.half_height / self.bladder_width)


@dataclass(frozen=True)
class DielectricParams:
    """Explicit dielectric parameters of the electrode gap.

    The residual oil thickness ``dielectric_thickness`` is unknown on real
    hardware and may be absent; in that case only the lumped mixing
    parameter K is usable.  ``electrode_overlap_area`` is in mm^2 and
    ``dielectric_thickness`` in mm.
    """

    relative_permittivity: float = 3.4
    vacuum_permittivity: float = VACUUM_PERMITTIVITY
    electrode_overlap_area: Optional[float] = None
    dielectric_thickness: Optional[float] = None

    def __post_init__(self):
        if self.relative_permittivity < 1.0:
            raise GeometryError(
                f"relative_permittivity must be >= 1, got {self.relative_permittivity!r}"
            )
        # zero overlap is a meaningful degenerate case (no attraction force)
        if self.electrode_overlap_area is not None and self.electrode_overlap_area < 0:
            raise GeometryError("electrode_overlap_area must be >= 0 when present")
        if self.dielectric_thickness is not None and self.dielectric_thickness <= 0:
            raise GeometryError("dielectric_thickness must be positive when present")


@dataclass(frozen=True)
class CalibrationParams:
    """Lumped electrostatic calibration.

    ``mixing_parameter`` is K in N mm^-2 kV^-2, so that the bladder
    pressure is P = K u^2 with u in kV.  ``calibration_voltage`` records
    the drive level the calibration data was taken at.
    """

    mixing_parameter: float = DEFAULT_MIXING_PARAMETER
    calibration_voltage: float = DEFAULT_CALIBRATION_VOLTAGE

    def __post_init__(self):
        if not (math.isfinite(self.mixing_parameter) and self.mixing_parameter > 0):
            raise GeometryError(f"mixing_parameter must be positive, got {self.mixing_parameter!r}")


class DisplacementConvention(enum.Enum):
    """How a measured stack displacement maps onto per-actuator squeeze."""

    TOTAL_AS_DELTA_H = "total"
    PER_ACTUATOR_SHARE = "per_actuator"


@dataclass(frozen=True)
class StackConfig:
    """A series stack of identical actuators.

    ``preload_displacement`` is squeeze already present before any external
    displacement is applied (mm); it is added by the device composition,
    not by :func:`stack_force` itself.
    """

    actuator_count: int = 1
    convention: DisplacementConvention = DisplacementConvention.TOTAL_AS_DELTA_H
    preload_displacement: float = 0.0

    def __post_init__(self):
        if not (isinstance(self.actuator_count, int) and self.actuator_count >= 1):
            raise GeometryError(f"actuator_count must be an integer >= 1, got {self.actuator_count!r}")
        if not (math.isfinite(self.preload_displacement) and self.preload_displacement >= 0):
            raise GeometryError("preload_displacement must be >= 0")

    def effective_delta_h(self, displacement: float) -> float:
        """Per-actuator squeeze for a given total stack displacement, mm."""
        if self.convention is DisplacementConvention.TOTAL_AS_DELTA_H:
            return displacement
        return displacement / self.actuator_count


@dataclass(frozen=True)
class SqueezeState:
    """Intermediate squeeze quantities at one squeeze displacement.

    ``area_lost`` is the cross-section area removed vertically and
    ``area_gained`` the area added laterally; oil incompressibility makes
    them equal.  ``squeezed_area`` is the electrode-facing surface S.
    """

    delta_h: float
    delta_x: float
    area_lost: float
    area_gained: float
    squeezed_area: float


def expanded_half_height(geom: ActuatorGeometry) -> float:
    """Half-height h of the fully expanded bladder, mm."""
    return geom.half_height


def wedge_angle(geom: ActuatorGeometry) -> float:
    """Wedge angle alpha = arctan(2h / x), rad."""
    return geom.wedge_angle


def _check_delta_h(geom: ActuatorGeometry, delta_h: float) -> float:
    h = geom.half_height
    if not math.isfinite(delta_h) or delta_h < 0.0:
        raise DomainError(f"delta_h must be >= 0, got {delta_h!r}")
    if delta_h >= h:
        raise DomainError(
            f"delta_h = {delta_h:g} mm reaches or exceeds the half-height h = {h:g} mm "
            "(full collapse, outside model validity)"
        )
    return h


def lateral_advance(geom: ActuatorGeometry, delta_h: float) -> float:
    """Horizontal advance of the bladder toward the electrodes, mm.

    Solves the incompressibility balance: the vertical cross-section area
    lost, delta_h^2 / tan(alpha), equals the lateral area gained,
    delta_x * (h - delta_h).  Singular at delta_h = h.
    """
    h = _check_delta_h(geom, delta_h)
    tan_alpha = 2.0 * h / geom.bladder_width
    return delta_h * delta_h / (tan_alpha * (h - delta_h))


def squeeze_state(geom: ActuatorGeometry, delta_h: float) -> SqueezeState:
    """All intermediate squeeze quantities at ``delta_h``."""
    h = _check_delta_h(geom, delta_h)
    tan_alpha = 2.0 * h / geom.bladder_width
    area_lost = delta_h * delta_h / tan_alpha
    delta_x = lateral_advance(geom, delta_h)
    area_gained = delta_x * (h - delta_h)
    s = (2.0 * delta_h / tan_alpha + delta_x) * geom.bladder_length
    return SqueezeState(
        delta_h=delta_h,
        delta_x=delta_x,
        area_lost=area_lost,
        area_gained=area_gained,
        squeezed_area=s,
    )


def squeezed_area(geom: ActuatorGeometry, delta_h: float) -> float:
    """Electrode-facing squeezed surface area, mm^2.

    S = (2 delta_h / tan(alpha) + delta_x) * L, zero when unsqueezed.
    """
    h = _check_delta_h(geom, delta_h)
    tan_alpha = 2.0 * h / geom.bladder_width
    return (2.0 * delta_h / tan_alpha + lateral_advance(geom, delta_h)) * geom.bladder_length


def maxwell_pressure(cal: CalibrationParams, voltage: float) -> float:
    """Electrostatic liquid pressure P = K u^2, N/mm^2 (sign of u irrelevant)."""
    return cal.mixing_parameter * voltage * voltage


def maxwell_force_explicit(diel: DielectricParams, voltage: float) -> float:
    """Electrode attraction force from the explicit parallel-plate form, N.

    F = eps_r eps_0 A u^2 / (2 d^2) with A in mm^2, d in mm and u in kV.
    The mm^2/mm^2 unit factors cancel; the kV^2 -> V^2 conversion leaves a
    factor 1e6.  Requires both overlap area and dielectric thickness.
    """
    if diel.electrode_overlap_area is None:
        raise MissingParameterError("electrode_overlap_area is required for the explicit force form")
    if diel.dielectric_thickness is None:
        raise MissingParameterError("dielectric_thickness is required for the explicit force form")
    u_sq_v = (voltage * 1e3) ** 2
    return (
        0.5
        * diel.relative_permittivity
        * diel.vacuum_permittivity
        * diel.electrode_overlap_area
        * u_sq_v
        / (diel.dielectric_thickness**2)
    )


def mixing_parameter_from_dielectric(diel: DielectricParams) -> float:
    """Mixing parameter K implied by explicit dielectric parameters.

    K = eps_r eps_0 / (2 d^2) expressed in N mm^-2 kV^-2 (d in mm).
    """
    if diel.dielectric_thickness is None:
        raise MissingParameterError("dielectric_thickness is required to derive the mixing parameter")
    d_m = diel.dielectric_thickness * 1e-3
    return 0.5 * diel.relative_permittivity * diel.vacuum_permittivity / (d_m * d_m)


def single_actuator_force(
    geom: ActuatorGeometry, cal: CalibrationParams, delta_h: float, voltage: float
) -> float:
    """Vertical feedback force of one actuator, N: F = 2 P S."""
    return 2.0 * maxwell_pressure(cal, voltage) * squeezed_area(geom, delta_h)


def stack_force(
    stack: StackConfig,
    geom: ActuatorGeometry,
    cal: CalibrationParams,
    displacement: float,
    voltage: float,
) -> float:
    """Force transmitted by a series stack at total displacement D, N.

    The displacement convention maps D onto a per-actuator squeeze; a
    series stack transmits a single force, so the result equals the
    single-actuator force at that squeeze.
    """
    if not math.isfinite(displacement) or displacement < 0.0:
        raise DomainError(f"stack displacement must be >= 0, got {displacement!r}")
    return single_actuator_force(geom, cal, stack.effective_delta_h(displacement), voltage)


def calibrate_k(
    points: Sequence[tuple[float, float]],
    calibration_voltage: float,
    geom: ActuatorGeometry,
    stack: StackConfig,
) -> CalibrationParams:
    """Least-squares fit of the mixing parameter K from (D, F) measurements.

    The model is linear in K: F_i = 2 K u^2 S(D_i), so the minimizer of
    sum_i (F_i - 2 K u^2 S_i)^2 is closed-form:

        K = sum_i F_i S_i / (2 u^2 sum_i S_i^2)

    Parameters
    ----------
    points : sequence of (displacement mm, force N)
        Measured stack displacement / feedback force pairs.
    calibration_voltage : float
        Drive amplitude the measurements were taken at, kV.
    geom : ActuatorGeometry
    stack : StackConfig
        Supplies the displacement convention (and actuator count).
    """
    if len(points) == 0:
        raise CalibrationError("at least one measurement point is required")
    if not (math.isfinite(calibration_voltage) and calibration_voltage > 0):
        raise CalibrationError(f"calibration voltage must be positive, got {calibration_voltage!r}")
    areas = [squeezed_area(geom, stack.effective_delta_h(d)) for d, _ in points]
    denom = 2.0 * calibration_voltage**2 * sum(s * s for s in areas)
    if denom == 0.0:
        raise CalibrationError("all measurement points have zero squeezed area; K is unidentifiable")
    k = sum(f * s for (_, f), s in zip(points, areas)) / denom
    return CalibrationParams(mixing_parameter=k, calibration_voltage=calibration_voltage)
