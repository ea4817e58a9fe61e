"""Synthesize and simulate the null controls for y0 = phi_1 (moment and Gramian)."""
import argparse
import time

from fraccontrol.biorthogonal import calibrate_g0
from fraccontrol.simulator import evolve
from fraccontrol.spectrum import FracModel
from fraccontrol.synthesis import ModalState, min_norm_control, moment_control


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--s", type=float, default=0.75)
    p.add_argument("--T", type=float, default=0.3)
    p.add_argument("--N", type=int, default=30)
    a = p.parse_args()
    y0 = ModalState.mode(1)

    heat = FracModel(a.s, "heat")
    t = time.perf_counter()
    g0 = calibrate_g0(heat, a.T).g0
    mc = moment_control(y0, a.T, heat, g0=g0)
    rep = evolve(y0, mc.control, heat, a.N)
    print(f"heat moment   g0={g0:.4f} log cost={mc.log_cost:.4f} residual={rep.residual_rel:.2e} "
          f"interp={rep.interp_error:.1e} support={mc.inversion.support_violation:.1e} "
          f"({time.perf_counter() - t:.1f}s)")

    t = time.perf_counter()
    gc = min_norm_control(y0, a.T, a.N, heat, grid_size=2 ** 19 + 1)
    rep = evolve(y0, gc.control, heat, a.N)
    print(f"heat gramian  log cost={gc.log_cost:.4f} residual={rep.residual_rel:.2e} "
          f"interp={rep.interp_error:.1e} ({time.perf_counter() - t:.1f}s)")

    schr = FracModel(a.s, "schrodinger")
    t = time.perf_counter()
    sc = min_norm_control(y0, a.T, a.N, schr, grid_size=2 ** 16 + 1)
    rep = evolve(y0, sc.control, schr, 2 * a.N)
    print(f"schr gramian  log cost={sc.log_cost:.4f} residual(1..{a.N})="
          f"{rep.residual_on(range(1, a.N + 1)):.2e} residual(1..{2 * a.N})={rep.residual_rel:.2e} "
          f"({time.perf_counter() - t:.1f}s)")


if __name__ == "__main__":
    main()
