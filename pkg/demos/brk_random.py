"""How much can a single magnitude band inflate the spectral norm?

For random matrices the answer is "hardly at all": brk stays close to 1 for
Gaussian Hermitian matrices and for embeddings of Haar-random unitaries, and
shrinks as the dimension grows.  That is what makes splitting a Hamiltonian
by entry magnitude cheap in practice.

    python3 demos/brk_random.py [trials]
"""
import sys

from walksim.experiments import brk_random
from _common import write_csv

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20

herm = brk_random("hermitian", [4, 8, 16, 32], trials, seed=1)
unit = brk_random("unitary_embedding", [4, 8, 16], trials, seed=1)

print(f"{'ensemble':>18} {'dim':>4} {'mean brk':>9} {'max brk':>8}")
for name, res in (("hermitian", herm), ("unitary_embedding", unit)):
    for s in res.summary:
        print(f"{name:>18} {s['dim']:>4} {s['mean']:>9.4f} {s['max']:>8.4f}")

path = write_csv("brk_random.csv", [{"ensemble": "hermitian", **r} for r in herm.rows]
                 + [{"ensemble": "unitary_embedding", **r} for r in unit.rows])
print(f"per-trial values written to {path}")
