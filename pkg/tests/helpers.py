"""Shared builders and hypothesis strategies for the test suite."""

import itertools
from collections import defaultdict
from fractions import Fraction

from hypothesis import strategies as st

from boundinfo import distribution as dc


@st.composite
def small_distributions(draw, names=("X", "Y", "Z"), max_size=3, eve_last=True):
    """Rational distribution with integer weights over a few small registers."""
    regs = []
    for k, n in enumerate(names):
        size = draw(st.integers(1, max_size))
        owner = dc.EVE if eve_last and k == len(names) - 1 else n
        regs.append(dc.RegisterSpec(n, tuple(str(i) for i in range(size)), owner))
    outcomes = list(dc.all_outcomes(regs))
    weights = draw(st.lists(st.integers(0, 5), min_size=len(outcomes), max_size=len(outcomes)))
    if sum(weights) == 0:
        weights[draw(st.integers(0, len(weights) - 1))] = 1
    total = sum(weights)
    return dc.make_distribution(regs, [(o, Fraction(w, total)) for o, w in zip(outcomes, weights)])


def brute_marginal(d, keep):
    """Marginal as a plain dict, summing rows one at a time."""
    out = defaultdict(Fraction)
    for row, p in d.as_dicts():
        out[tuple(row[n] for n in keep)] += p
    return dict(out)


def brute_product(d1, d2):
    return {o1 + o2: p1 * p2
            for (o1, p1), (o2, p2) in itertools.product(d1.table.items(), d2.table.items())}
