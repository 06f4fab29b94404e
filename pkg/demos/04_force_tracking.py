"""Closed-loop PI force tracking of slow periodic targets.

Runs the 1 kHz PI loop (kp=0.75, ki=0.035, output clamped to 0-6 kV)
against 0.08 Hz sine, square and triangle force targets at a fixed pinch.
The actuator only pushes outward, so falling square edges settle on the
plant's own decay while rising edges get full drive authority; the
steady-state RMS error of the sine stays below 5% of its amplitude.

Run:  python demos/04_force_tracking.py
"""

import numpy as np

from ehsim.config import default_config
from ehsim.control import TargetShape, TargetSpec, simulate_tracking

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
    dev = cfg.device()
    displacement = cfg.experiments.track.displacement
    duration = 25000.0

    results = {}
    for shape in (TargetShape.SINE, TargetShape.SQUARE, TargetShape.TRIANGLE):
        target = TargetSpec(shape=shape, frequency=0.08, amplitude=0.5, offset=0.6)
        trace = simulate_tracking(dev, cfg.plant, cfg.controller, target,
                                  displacement, duration)
        steady = trace.t >= 12500.0
        err = trace.target_force[steady] - trace.actual_force[steady]
        rms = float(np.sqrt(np.mean(err**2)))
        results[shape.value] = trace
        print(f"{shape.value:8s}: steady RMS error {rms:.4f} N "
              f"({rms / target.amplitude:.1%} of amplitude), "
              f"peak drive {trace.voltage.max():.2f} kV")

    print("\nthe square target exposes the unidirectional drive: after a")
    print("falling edge the voltage clamps at 0 kV and the force can only")
    print("decay at the plant rate, so falling edges settle more slowly.")

    if plt is not None:
        OUT.mkdir(exist_ok=True)
        fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
        for ax, (name, trace) in zip(axes, results.items()):
            ax.plot(trace.t / 1000.0, trace.target_force, "k--", label="target")
            ax.plot(trace.t / 1000.0, trace.actual_force, label="actual")
            ax.set_ylabel(f"{name}\nforce (N)")
            ax.legend(loc="upper right")
        axes[-1].set_xlabel("time (s)")
        fig.tight_layout()
        fig.savefig(OUT / "force_tracking.png", dpi=120)
        print(f"\nplot written to {OUT}/force_tracking.png")


if __name__ == "__main__":
    main()
