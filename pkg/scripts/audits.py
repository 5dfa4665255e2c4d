"""Print the auxiliary-inequality audit lines."""
import argparse

from rswlab.audits import run_audits


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    for line in run_audits(seed=ap.parse_args().seed):
        print(line.render())


if __name__ == "__main__":
    main()
