"""Squeeze-force model of a single electrohydraulic actuator.

Walks the static model end to end: bladder geometry to expanded
half-height and wedge angle, squeeze displacement to the squeezed surface
area, and electrostatic pressure to the vertical feedback force.  Then
fits the mixing parameter K to the bundled three-point measurement set
and compares model predictions against the measured forces.

Run:  python demos/01_actuator_force_model.py
"""

import numpy as np

from ehsim.actuator import (
    ActuatorGeometry,
    CalibrationParams,
    calibrate_k,
    expanded_half_height,
    single_actuator_force,
    squeeze_state,
    wedge_angle,
)
from ehsim.experiments import CALIBRATION_MEASUREMENTS, CALIBRATION_STACK

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

from pathlib import Path

OUT = Path(__file__).resolve().parent / "output"


def main():
    geom = ActuatorGeometry()
    print("== Bladder geometry ==")
    print(f"oil volume        : {geom.oil_volume} mm^3")
    print(f"bladder width     : {geom.bladder_width} mm")
    print(f"bladder length    : {geom.bladder_length} mm")
    print(f"expanded h        : {expanded_half_height(geom):.3f} mm")
    print(f"wedge angle       : {np.degrees(wedge_angle(geom)):.2f} deg")

    print("\n== Squeeze kinematics (oil is incompressible) ==")
    for dh in (0.125, 0.250, 0.375):
        s = squeeze_state(geom, dh)
        print(f"dh={dh:.3f} mm -> lateral advance {s.delta_x:.4f} mm, "
              f"area lost {s.area_lost:.4f} = gained {s.area_gained:.4f} mm^2, "
              f"squeezed surface {s.squeezed_area:.2f} mm^2")

    print("\n== Calibration of the mixing parameter K ==")
    fitted = calibrate_k(CALIBRATION_MEASUREMENTS, 6.0, geom, CALIBRATION_STACK)
    print(f"bundled measurements (6 kV, three-actuator stack): {CALIBRATION_MEASUREMENTS}")
    print(f"least-squares K   : {fitted.mixing_parameter:.4e} N/mm^2/kV^2")
    print(f"shipped default K : {CalibrationParams().mixing_parameter:.4e} N/mm^2/kV^2")

    cal = CalibrationParams()
    print("\n== Model vs measurement at the default K ==")
    for d, measured in CALIBRATION_MEASUREMENTS:
        predicted = single_actuator_force(geom, cal, d, 6.0)
        gap = (predicted - measured) / measured
        print(f"D={d:.3f} mm: model {predicted:.4f} N, measured {measured:.4f} N "
              f"({gap:+.1%})")

    if plt is not None:
        OUT.mkdir(exist_ok=True)
        dh = np.linspace(0.0, 0.5, 200)
        fig, ax = plt.subplots(figsize=(6, 4))
        for u in (4.0, 5.0, 6.0):
            ax.plot(dh, [single_actuator_force(geom, cal, x, u) for x in dh],
                    label=f"{u:g} kV")
        ax.plot(*zip(*CALIBRATION_MEASUREMENTS), "ko", label="measured (6 kV)")
        ax.set_xlabel("squeeze displacement (mm)")
        ax.set_ylabel("feedback force (N)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(OUT / "actuator_force_model.png", dpi=120)
        print(f"\nplot written to {OUT}/actuator_force_model.png")


if __name__ == "__main__":
    main()
