"""Five copies, one for each group of four parties out of five.

Any two of the five parties can run the two-copy activation on the copies
that each omit one of them, so every pair gets a secret bit. Chaining
pairwise keys then gives all five a common key.
"""

import itertools
import time

from boundinfo import distribution as dc
from boundinfo import protocols as lp

t0 = time.perf_counter()
d = lp.symmetrized_five()
print(f"five-copy product: {len(d)} rows, Eve holds {', '.join(d.eve_view())}")
for pair in itertools.combinations(lp.FIVE_PARTIES, 2):
    _, ok, _ = lp.distill_pair_from_five(d, pair)
    print(f"  sbit{pair}: {ok}")
print(f"({time.perf_counter() - t0:.1f} s)")

star = [lp.pairwise_sbit(f"A_{p}", f"{p}_A", ("A", p)) for p in "BCDE"]
key = lp.multipartite_from_pairwise(star, root="A")
print("five-party key from a star of pairwise keys:",
      dc.is_multipartite_sbit(key, [f"key_{p}" for p in "ABCDE"]))
