"""Primitive solver versus Klein-Gordon solver on constant-PV data under refinement."""
from rswlab.fields import make_bump_data
from rswlab.grid import make_grid
from rswlab.klein_gordon import KG_LAW, cross_validate
from rswlab.solver import SolverConfig


def main():
    prev = None
    for n in (256, 512, 1024, 2048):
        s0 = make_bump_data("constant-pv", 0.05, 2.0, make_grid(-12.0, 12.0, n), exponent=5)
        d = cross_validate(s0, KG_LAW, SolverConfig(t_end=5.0, sample_interval=0.5)).max_discrepancy
        ratio = f"{prev / d:6.2f}" if prev else "     -"
        print(f"N={n:5d}  discrepancy {d:.3e}  ratio {ratio}")
        prev = d


if __name__ == "__main__":
    main()
