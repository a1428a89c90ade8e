"""The hull-function operator E, which needs no denominator.

Uses the single hull function z / 0.6 on K = closed disk of radius 0.5. The
approximant is a polynomial in the hull function, so its sup-norm over U
grows like a power of 1/eps; the script compares that growth with the
predicted exponent d1.

    python demos/hull_operator.py
"""

import os

from hrunge.config import load_scenario
from hrunge.runner import _Clock, run_study

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    sc = load_scenario(os.path.join(HERE, "configs", "hull.json"))
    rows = run_study(sc, _Clock())
    print(f"{'eps':>9} {'n':>4} {'error':>10} {'sup norm':>10}")
    for r in rows:
        print(f"{r['eps']:9.5f} {r['n_hull']:4d} {r['sup_error']:10.2e} {r['sup_norm']:10.3g}")
    r0 = rows[0]
    print(f"r = {r0['r']:.4f}, R = {r0['R']:.4f}, d1 = {r0['d1']:.3f}")
    print(f"error slope {r0['fitted_slope']:.2f}, norm growth exponent {r0['norm_slope']:.3f}")


if __name__ == "__main__":
    main()
