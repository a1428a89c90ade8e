"""Convergence of the Blaschke-based operator on the radial scenario.

K is the closed disk of radius 0.3, U the open disk of radius 0.7 and
f(z) = 1/(z - 0.8). For each tolerance the script prints the zero count N,
the measured error, the a-priori budget and the separation bracket, then the
fitted slope of log(error) against log(eps).

    python demos/radial_convergence.py [--pitch 1/64]
"""

import argparse
import os

from hrunge.config import load_scenario
from hrunge.runner import _Clock, run_study

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--pitch", default=None)
    args = ap.parse_args()
    sc = load_scenario(os.path.join(HERE, "configs", "radial.json"), pitch=args.pitch)
    clock = _Clock()
    rows = run_study(sc, clock)
    print(f"{'eps':>9} {'N':>5} {'error':>10} {'budget':>10} {'log delta':>10} bracket")
    for r in rows:
        print(f"{r['eps']:9.5f} {r['N']:5d} {r['sup_error']:10.2e} {r['error_budget']:10.2e} "
              f"{r['log_delta_eps']:10.2f} {r['bracket_ok']}")
    print(f"fitted slope {rows[0]['fitted_slope']:.2f} (>= 0.9 expected)")
    print(f"total time {sum(clock.t.values()):.1f} s")


if __name__ == "__main__":
    main()
