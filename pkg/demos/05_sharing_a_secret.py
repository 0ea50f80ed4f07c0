"""Bound information extends a shared secret to a fourth party.

Alice, Bob and Clare share a secret bit s. Each publishes s plus their
bound-information bit; David adds the three announcements to his own bit
and recovers s, while Eve's guess stays random. The quantum counterpart
extends a three-party GHZ state to four parties.
"""

from boundinfo import distribution as dc
from boundinfo import measures as im
from boundinfo import protocols as lp
from boundinfo import quantum as qc

final, t = lp.distribute_secret()
for s in (0, 1):
    print(f"announcements and David's bit given s = {s}")
    print(lp.secret_view(final, s=s, stage="table-18"))
info = im.conditional_mutual_information(final, ["s_A"], list(final.eve_view()))
print("David's bit always equals s:",
      all(r["s_D"] == r["s_A"] for r, _ in final.as_dicts()))
print(f"I(s : Eve's view) = {info.value} (exact={info.exact})")
print("four-party key:", dc.is_multipartite_sbit(final, ["s_A", "s_B", "s_C", "s_D"]))

res = qc.ghz_extend()
print(f"\nGHZ extension: {len(res.branches)} Kraus outcomes, "
      f"worst fidelity {res.fidelity:.9f}, outcome probabilities "
      f"{sorted({str(p) for p in res.distribution.table.values()})}")
