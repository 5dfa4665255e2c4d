"""Long run on small constant-PV data: tracks max|Z| and the conserved quantities."""
import numpy as np

from rswlab.fields import make_bump_data
from rswlab.grid import make_grid
from rswlab.kernels import GammaLaw
from rswlab.solver import SolverConfig, run


def main():
    law = GammaLaw(2.0)
    s0 = make_bump_data("constant-pv", 1e-3, 2.0, make_grid(-130.0, 130.0, 6501))
    res = run(s0, law, SolverConfig(t_end=100.0, sample_interval=5.0))
    zabs = np.maximum(np.abs(res.series("min_z")), np.abs(res.series("max_z")))
    e = res.series("energy")
    for t, z, en in zip(res.times, zabs, e):
        print(f"t={t:6.1f}  max|Z| {z:.3e}  energy drift {abs(en - e[0]) / e[0]:.2e}")
    print(f"status {res.status}; growth factor {zabs.max() / zabs[0]:.3f}")


if __name__ == "__main__":
    main()
