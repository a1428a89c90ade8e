"""Two-variable approximation on K x K in the bidisk.

f(z1, z2) = 1/(z1 + z2 - 1.3) is approximated by inducting on the variables,
first with the Blaschke-based operator (denominator b1(z1) b2(z2)) and then,
with the second config, with the hull-function operator.

    python demos/bidisk.py
"""

import os

from hrunge.config import load_scenario
from hrunge.runner import _Clock, run_bidisk

HERE = os.path.dirname(os.path.abspath(__file__))


def show(name):
    sc = load_scenario(os.path.join(HERE, "configs", name))
    rows = run_bidisk(sc, _Clock())
    print(f"{name}: kind {sc.kind}")
    for r in rows:
        extra = (f"log inf|b| {r['log_inf_b']:.1f}" if sc.kind == "bidisk"
                 else f"n {r['n_hull']}, d1 {r['d1']:.2f}")
        print(f"  eps {r['eps']:.4f}: error {r['sup_error']:.2e} at {r['error_witness']}, {extra}")
    print(f"  fitted slope {rows[0]['fitted_slope']:.2f}")


if __name__ == "__main__":
    show("bidisk.json")
    show("bidisk_entire.json")
