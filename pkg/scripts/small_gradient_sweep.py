"""Small-gradient threshold versus initial energy on a fixed velocity-bump profile.

Prints the threshold, F^-1(G0 E0), and their ratios to E0^(1/3).
"""
import numpy as np

from rswlab.fields import infimum_z, make_bump_data, threshold_report
from rswlab.grid import make_grid
from rswlab.kernels import GammaLaw


def main():
    law = GammaLaw(2.0)
    g = make_grid(-12.0, 12.0, 2048)
    unit = -infimum_z(make_bump_data("velocity-bump", 1.0, 1.0, g), law)
    rows = []
    print(f"{'|infZ0|':>8} {'E0':>10} {'threshold':>10} {'thr/E0^1/3':>11} {'alpha':>10} "
          f"{'alpha/E0^1/3':>12} fires")
    for k in np.geomspace(0.13, 1.3, 9):
        rep = threshold_report(make_bump_data("velocity-bump", k / unit, 1.0, g), law)
        e0, thr, al = rep.constants.e0, abs(rep.thm12_threshold), rep.alpha_bound
        rows.append((e0, thr, al))
        print(f"{k:8.3f} {e0:10.3e} {thr:10.4f} {thr / e0 ** (1 / 3):11.4f} {al:10.4f} "
              f"{al / e0 ** (1 / 3):12.4f} {rep.thm12_satisfied}")
    e0, thr, al = map(np.array, zip(*rows))
    print(f"fitted exponents: threshold {np.polyfit(np.log(e0), np.log(thr), 1)[0]:.3f}, "
          f"alpha {np.polyfit(np.log(e0), np.log(al), 1)[0]:.3f}")


if __name__ == "__main__":
    main()
