"""exp(-i pi J_x / 2): a dense unitary whose entries are all small.

The largest entry shrinks like J^(-1/4).  The exact walk needs about
(pi/2) N ||U||_max steps, so its cost grows like N^(3/4) rather than like
the dimension N = 2J + 1.

    python3 demos/spin_rotation.py
"""
import numpy as np

from walksim.experiments import spin_rotation_data
from walksim.numerics import loglog_slope
from _common import write_csv

Js = [12.5, 25, 50, 100, 200, 400]
rows = []
for J in Js:
    s = spin_rotation_data(J, eps=0.1).summary
    rows.append({k: s[k] for k in ("J", "N", "max_abs_entry", "formula", "ratio",
                                   "unitarity_error", "corr11", "exact_walk_steps")})
    print(f"J={J:>6}: N={s['N']:>4}  max|U_jk|={s['max_abs_entry']:.5f}  "
          f"closed form={s['formula']:.5f}  walk steps={s['exact_walk_steps']:>4}  "
          f"unitarity err={s['unitarity_error']:.1e}")
N = np.array([r["N"] for r in rows])
print(f"max-entry exponent in N:  {loglog_slope(N, [r['max_abs_entry'] for r in rows]):.3f}")
print(f"walk-step exponent in N:  {loglog_slope(N, [r['exact_walk_steps'] for r in rows]):.3f}")
print(f"written to {write_csv('spin_rotation.csv', rows)}")
