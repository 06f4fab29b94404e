"""Pinch mechanism statics and the full-device force map.

Shows how a vertical pinch displacement advances the squeeze plates and
tilts the connecting rods, and how the actuator force projects back onto
the finger.  Sweeps the full 15 mm stroke with the squeeze shared across
a 30-actuator stack, reproducing the force jump at zero pinch caused by
the preloaded stacks.

Run:  python demos/02_pinch_mechanism.py
"""

import numpy as np

from ehsim.actuator import DisplacementConvention
from ehsim.config import default_config
from ehsim.control import static_force_map
from ehsim.mechanism import plate_displacement, rod_angle

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

from pathlib import Path

OUT = Path(__file__).resolve().parent / "output"


def main():
    cfg = default_config()
    mech = cfg.mechanism
    print("== Rod kinematics (R=35 mm, vertical offset 15 mm) ==")
    for pinch in (0.0, 5.0, 10.0, 15.0):
        dx = plate_displacement(mech, pinch)
        theta = rod_angle(mech, pinch)
        print(f"pinch {pinch:5.1f} mm -> plate {dx:.3f} mm, rod angle "
              f"{np.degrees(theta):5.2f} deg")

    print("\n== Device force over the stroke (6 kV, squeeze shared over 30) ==")
    dev = cfg.device(convention=DisplacementConvention.PER_ACTUATOR_SHARE)
    stroke = np.linspace(0.0, mech.max_pinch_stroke, 151)
    forces = np.array([static_force_map(dev, p, 6.0) for p in stroke])
    print(f"preload             : {cfg.stack.preload_displacement} mm")
    print(f"force at zero pinch : {forces[0]:.4f} N  (nonzero: stacks preloaded)")
    print(f"peak force          : {forces.max():.4f} N at "
          f"{stroke[forces.argmax()]:.1f} mm")
    print("hardware reference envelope for this sweep: 2-5 N; the shipped")
    print("defaults use an unpublished offset/preload, so magnitudes differ.")

    print("\n== Same squeeze carried by one bladder (higher force, short stroke) ==")
    total = cfg.device(convention=DisplacementConvention.TOTAL_AS_DELTA_H)
    for pinch in (0.0, 1.0, 2.0, 3.0, 4.0):
        print(f"pinch {pinch:4.1f} mm -> {static_force_map(total, pinch, 6.0):7.4f} N")

    if plt is not None:
        OUT.mkdir(exist_ok=True)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(stroke, forces)
        ax.set_xlabel("pinch displacement (mm)")
        ax.set_ylabel("finger force (N)")
        ax.set_title("full-stroke static force at 6 kV")
        fig.tight_layout()
        fig.savefig(OUT / "pinch_mechanism.png", dpi=120)
        print(f"\nplot written to {OUT}/pinch_mechanism.png")


if __name__ == "__main__":
    main()
