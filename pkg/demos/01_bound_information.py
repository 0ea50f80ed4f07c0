"""Bound information from the Smolin state.

Measuring the Smolin state and Eve's purification gives a four-party
distribution with perfect correlations that no single 2-vs-2 cut can turn
into a secret key: Eve can coarse-grain her symbol so that the conditional
mutual information vanishes exactly.
"""

from boundinfo import distribution as dc
from boundinfo import measures as im
from boundinfo import quantum as qc
from boundinfo import tables

rho = qc.smolin_state()
print("PPT across the 2-vs-2 cuts:",
      {"".join(c): qc.is_ppt(rho, c) for c in (["A", "B"], ["A", "C"], ["A", "D"])})

basis = qc.MeasurementBasis.computational(["A", "B", "C", "D"]).merged(
    qc.MeasurementBasis({"Eve": qc.pair_eve_basis()}))
measured, exact = qc.measure(qc.smolin_purification(), basis)
print("\nmeasured distribution (exact rationals: %s)" % exact)
print(dc.reorder(measured, ["A", "C", "B", "D", "Eve"]))
print("matches the reference table up to Eve symbols:",
      dc.equal_up_to_relabel(measured, tables.table_7(), "Eve"))

d = tables.table_7()
for xs, ys in (("AC", "BD"), ("AB", "CD"), ("AD", "BC")):
    ident = im.conditional_mutual_information(d, list(xs), list(ys), ["Eve"])
    best, ch = im.intrinsic_information_search(d, list(xs), list(ys), ["Eve"])
    blocks = sorted(sorted(b) for b in ch.partition())
    print(f"{xs}:{ys}  I(X:Y|Eve) = {ident.value:.3f}  "
          f"after Eve merges {blocks}: {best.value} (exact={best.exact})")
