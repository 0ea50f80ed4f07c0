"""Two parties join and unlock a secret bit for the other two.

Bob and David announce whether their bits agree. In either branch Alice and
Clare are left holding a perfectly correlated bit that Eve knows nothing
about, even though Eve heard the announcement.
"""

from boundinfo import distribution as dc
from boundinfo import protocols as lp
from boundinfo import quantum as qc
from boundinfo import tables

branches, transcript = lp.unlock(tables.table_7(), ("B", "D"), ("A", "C"))
for step in transcript.steps:
    print(f"{step.actor:>4}: {step.op}")
for b in branches:
    print(f"\nbranch {b.label} (probability {b.acceptance}), sbit(A,C) = {b.sbit}")
    print(dc.drop_public(b.dist))

worst, qbranches = qc.quantum_unlock()
print("\nquantum version: Bell measurement on A,B, Pauli fix on C")
for i, p, f in qbranches:
    print(f"  outcome psi{i}: p = {p:.3f}, fidelity with psi1 = {f:.9f}")
