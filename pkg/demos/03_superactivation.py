"""Two copies of bound information give David and Elena a secret bit.

Alice and Bob one-time-pad their second-copy bits to Clare and David over
the first copy. The result is bound information again, now shared by Clare
(twice), David and Elena; Clare's equality announcement unlocks it.
"""

from boundinfo import distribution as dc
from boundinfo import protocols as lp
from boundinfo import quantum as qc
from boundinfo import tables

final, t = lp.superactivate_pair()
for step in t.steps:
    tag = f"  [{step.snapshot}]" if step.snapshot else ""
    print(f"{step.actor:>3}: {step.op}{tag}")

s = t.snapshots
print("\ncheckpoint after both pads matches the reference:",
      dc.tables_equal(dc.drop_public(s["table-12"]), tables.table_22()))
print("final sbit(D',E):", dc.is_sbit(final, "D'", "E"))
print("Eve's view:", ", ".join(final.eve_view()))

r = qc.quantum_superactivation()
print(f"\nquantum: intermediate state vs Smolin, max entry distance {r.checkpoint_distance:.1e}")
print(f"quantum: {len(r.branches)} branches, worst fidelity with psi1 {r.fidelity:.9f}")
