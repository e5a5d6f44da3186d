"""RK4 step-size study on the damped and undamped single-axis oscillator.

Prints endpoint error against a dt/16 reference, the successive error
ratios (about 16 for fourth order) and the undamped amplitude drift over
ten periods.
"""

import argparse
import math

import numpy as np

from nacelle_tmd import MotionSeries, NacelleMotionSample, TmdAxisParams, TmdConfig, simulate


def oscillator(c: float, x0: float = 0.1) -> TmdConfig:
    return TmdConfig(TmdAxisParams(mass=1.0, k=100.0, c=c, initial_disp=x0, stop_max=10.0, stop_min=-10.0),
                     TmdAxisParams.disabled())


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, nargs="+", default=[0.04, 0.02, 0.01, 0.005])
    args = p.parse_args()

    series = MotionSeries.constant(NacelleMotionSample.at_rest(0.0), 2 * math.pi)
    cfg = oscillator(c=2.0)
    ref = simulate(series, cfg, min(args.dt) / 16, horizon=args.t_end).states[-1]
    print(f"{'dt':>8} {'endpoint error':>15} {'ratio':>7}")
    prev = None
    for dt in sorted(args.dt, reverse=True):
        err = float(np.linalg.norm(simulate(series, cfg, dt, horizon=args.t_end).states[-1] - ref))
        ratio = f"{prev / err:7.2f}" if prev else " " * 7
        print(f"{dt:8.4f} {err:15.3e} {ratio}")
        prev = err

    print("\nundamped amplitude drift over 10 periods")
    for dt in (1e-2, 5e-3, 1e-3):
        res = simulate(series, oscillator(c=0.0), dt)
        amp = np.hypot(res.states[:, 0], res.states[:, 1] / 10.0)
        print(f"{dt:8.4f} {np.abs(amp - 0.1).max():12.3e} m")


if __name__ == "__main__":
    main()
