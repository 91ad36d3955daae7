"""Implementing a unitary with a quantum walk.

A unitary U is embedded in H = [[0, U], [U^dagger, 0]]; since H^2 = 1,
exp(-i H pi/2) = -i H, which maps |1, psi> to -i |0, U psi>.  Walking on H
therefore applies U.  The exact walk needs about (pi/2) N ||U||_max steps,
which for the Fourier transform (all entries 1/sqrt(N)) is (pi/2) sqrt(N);
with three queries per coin preparation the total stays near 2 pi sqrt(N).
The search unitary maps |0> to the marked item, and the approximate walk
output peaks there.

    python3 demos/implement_unitary.py
"""
import numpy as np

from walksim import OracleSet, implement_unitary
from walksim.simulate import qft_matrix, search_unitary
from _common import write_csv

rows = []
for N in (4, 8, 16, 32):
    U = qft_matrix(N)
    psi = np.zeros(N, dtype=complex)
    psi[1] = 1
    rep = implement_unitary(OracleSet.from_unitary(U), "exact_walk", psi=psi)
    rows.append({"unitary": "qft", "N": N, "distance": rep.distance,
                 "walk_steps": rep.walk_steps, "queries": rep.ledger.total,
                 "2*pi*sqrt(N)": 2 * np.pi * np.sqrt(N)})
    print(f"QFT N={N:>3}: distance {rep.distance:.1e}, {rep.walk_steps:>3} walk steps, "
          f"{rep.ledger.total:>4} queries (2 pi sqrt N = {2 * np.pi * np.sqrt(N):.1f})")

N, marked = 16, 11
psi = np.zeros(N, dtype=complex)
psi[0] = 1
rep = implement_unitary(OracleSet.from_unitary(search_unitary(N, marked)), "theorem1",
                        eps=0.05, psi=psi)
w, Q = np.linalg.eigh(rep.output.matrix)
upper = np.abs(Q[:N, -1]) ** 2
print(f"search N={N}, marked {marked}: distance {rep.distance:.3f}, "
      f"output peaks on item {int(np.argmax(upper))}")
rows.append({"unitary": "search", "N": N, "distance": rep.distance, "walk_steps": rep.walk_steps,
             "queries": rep.ledger.total, "2*pi*sqrt(N)": 2 * np.pi * np.sqrt(N)})
print(f"written to {write_csv('implement_unitary.csv', rows)}")
