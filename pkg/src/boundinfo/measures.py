"""Entropic measures and Eve-channel search for the intrinsic information.

Distributions stay exact; entropies are evaluated in floating point
(bits). A value of exactly zero is only reported as *certified* when the
corresponding conditional independence holds in rational arithmetic.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distribution import (
    EVE,
    JointDistribution,
    RegisterSpec,
    frac_str,
    marginalize,
)
from .errors import (
    AlphabetMismatchError,
    OverlapError,
    SearchBudgetError,
    UnknownRegisterError,
)

COMPOSITE_SEP = ","


@dataclass(frozen=True)
class MeasureValue:
    value: float
    exact: bool = False

    def __float__(self):
        return self.value

    def to_json_obj(self, witness=None):
        obj = {"value": self.value, "exact": self.exact}
        if witness is not None:
            obj["witness"] = witness.to_json_obj()
        return obj


@dataclass(frozen=True)
class EveChannel:
    """Stochastic map on Eve's alphabet; ``matrix[o][e] = P(out o | in e)``."""

    inputs: tuple
    outputs: tuple
    matrix: tuple = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        m = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != len(self.outputs) or any(len(r) != len(self.inputs) for r in m):
            raise AlphabetMismatchError("channel matrix shape does not match its alphabets")
        for e in range(len(self.inputs)):
            col = [m[o][e] for o in range(len(self.outputs))]
            if any(x < 0 for x in col) or sum(col) != 1:
                raise ValueError(f"column for input {self.inputs[e]!r} is not a distribution")

    @classmethod
    def deterministic(cls, inputs, outputs, mapping):
        """``mapping`` sends each input symbol to an output symbol."""
        outputs = tuple(outputs)
        m = [[Fraction(int(mapping[e] == o)) for e in inputs] for o in outputs]
        return cls(tuple(inputs), outputs, m)

    @classmethod
    def identity(cls, alphabet):
        return cls.deterministic(alphabet, alphabet, {e: e for e in alphabet})

    @classmethod
    def constant(cls, alphabet, target=None):
        target = alphabet[0] if target is None else target
        return cls.deterministic(alphabet, alphabet, {e: target for e in alphabet})

    def is_deterministic(self):
        return all(x in (0, 1) for row in self.matrix for x in row)

    def as_mapping(self):
        """Input -> output dict for deterministic channels."""
        if not self.is_deterministic():
            raise ValueError("channel is not deterministic")
        return {e: next(o for k, o in enumerate(self.outputs) if self.matrix[k][i] == 1)
                for i, e in enumerate(self.inputs)}

    def partition(self):
        """Blocks of inputs merged to the same output (deterministic channels)."""
        blocks = defaultdict(set)
        for e, o in self.as_mapping().items():
            blocks[o].add(e)
        return {frozenset(b) for b in blocks.values()}

    def to_array(self):
        return np.array([[float(x) for x in row] for row in self.matrix])

    def to_json_obj(self):
        return {"inputs": list(self.inputs), "outputs": list(self.outputs),
                "matrix": [[frac_str(x) for x in row] for row in self.matrix]}

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_obj(), **kwargs)

    @classmethod
    def from_json_obj(cls, obj):
        return cls(obj["inputs"], obj["outputs"],
                   [[Fraction(x) for x in row] for row in obj["matrix"]])

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


def _names(x) -> list:
    return [x] if isinstance(x, str) else list(x)


def _marginal(d: JointDistribution, names: Sequence[str]) -> dict:
    idx = [d.position(n) for n in names]
    out = defaultdict(Fraction)
    for o, p in d.table.items():
        out[tuple(o[i] for i in idx)] += p
    return out


def _h(probs) -> float:
    h = 0.0
    for p in probs:
        if p:
            q = float(p)
            h -= q * math.log2(q)
    return h


def entropy(d: JointDistribution, subset) -> MeasureValue:
    """Shannon entropy (bits) of the marginal on ``subset``."""
    subset = _names(subset)
    if not subset:
        raise ValueError("entropy needs a non-empty register subset")
    missing = [n for n in subset if n not in d]
    if missing:
        raise UnknownRegisterError(f"unknown registers {missing}")
    m = _marginal(d, subset)
    if len(m) == 1:
        return MeasureValue(0.0, True)
    return MeasureValue(_h(m.values()))


def conditionally_independent(d: JointDistribution, xs, ys, zs) -> bool:
    """Exact test of P(x,y,z) P(z) == P(x,z) P(y,z) on the product of supports."""
    xs, ys, zs = _names(xs), _names(ys), _names(zs)
    xi = [d.position(n) for n in xs]
    yi = [d.position(n) for n in ys]
    zi = [d.position(n) for n in zs]
    pxyz = defaultdict(Fraction)
    pxz = defaultdict(Fraction)
    pyz = defaultdict(Fraction)
    pz = defaultdict(Fraction)
    for o, p in d.table.items():
        x = tuple(o[i] for i in xi)
        y = tuple(o[i] for i in yi)
        z = tuple(o[i] for i in zi)
        pxyz[x, y, z] += p
        pxz[x, z] += p
        pyz[y, z] += p
        pz[z] += p
    xs_by_z = defaultdict(list)
    ys_by_z = defaultdict(list)
    for x, z in pxz:
        xs_by_z[z].append(x)
    for y, z in pyz:
        ys_by_z[z].append(y)
    for z, w in pz.items():
        for x in xs_by_z[z]:
            for y in ys_by_z[z]:
                if pxyz.get((x, y, z), 0) * w != pxz[x, z] * pyz[y, z]:
                    return False
    return True


def conditional_mutual_information(d: JointDistribution, xs, ys, zs=()) -> MeasureValue:
    """I(X:Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z) in bits."""
    xs, ys, zs = _names(xs), _names(ys), _names(zs)
    if set(xs) & set(ys) or set(xs) & set(zs) or set(ys) & set(zs):
        raise OverlapError("X, Y and Z must be pairwise disjoint")
    missing = [n for n in xs + ys + zs if n not in d]
    if missing:
        raise UnknownRegisterError(f"unknown registers {missing}")
    if conditionally_independent(d, xs, ys, zs):
        return MeasureValue(0.0, True)
    hz = _h(_marginal(d, zs).values()) if zs else 0.0
    value = (_h(_marginal(d, xs + zs).values()) + _h(_marginal(d, ys + zs).values())
             - _h(_marginal(d, xs + ys + zs).values()) - hz)
    return MeasureValue(value)


def mutual_information(d: JointDistribution, xs, ys) -> MeasureValue:
    return conditional_mutual_information(d, xs, ys, ())


def eve_alphabet(d: JointDistribution, eve_regs) -> tuple:
    """Flattened alphabet of one or more Eve registers."""
    eve_regs = _names(eve_regs)
    alphas = [d.register(n).alphabet for n in eve_regs]
    if len(alphas) == 1:
        return alphas[0]
    return tuple(COMPOSITE_SEP.join(t) for t in itertools.product(*alphas))


def apply_eve_channel(d: JointDistribution, eve_regs, ch: EveChannel,
                      out: str = "Eve_bar") -> JointDistribution:
    """Replace ``eve_regs`` by one register holding the channel output."""
    eve_regs = _names(eve_regs)
    missing = [n for n in eve_regs if n not in d]
    if missing:
        raise UnknownRegisterError(f"unknown registers {missing}")
    alphabet = eve_alphabet(d, eve_regs)
    if tuple(ch.inputs) != tuple(alphabet):
        raise AlphabetMismatchError(
            f"channel inputs {ch.inputs} do not match Eve alphabet {alphabet}")
    keep = [n for n in d.names if n not in eve_regs]
    if out in keep:
        raise AlphabetMismatchError(f"output name {out!r} collides with a kept register")
    ki = [d.position(n) for n in keep]
    ei = [d.position(n) for n in eve_regs]
    col = {e: k for k, e in enumerate(ch.inputs)}
    table = defaultdict(Fraction)
    for o, p in d.table.items():
        e = COMPOSITE_SEP.join(o[i] for i in ei)
        rest = tuple(o[i] for i in ki)
        c = col[e]
        for k, sym in enumerate(ch.outputs):
            w = ch.matrix[k][c]
            if w:
                table[rest + (sym,)] += p * w
    regs = [d.registers[i] for i in ki] + [RegisterSpec(out, ch.outputs, EVE)]
    return JointDistribution(regs, dict(table), _trusted=True)


def intrinsic_information_upper(d: JointDistribution, xs, ys, eve_regs,
                                ch: EveChannel) -> MeasureValue:
    """I(X:Y|Eve_bar) for one channel: an upper bound on I(X:Y down Eve)."""
    xs, ys = _names(xs), _names(ys)
    reduced = marginalize(d, xs + ys + _names(eve_regs))
    mapped = apply_eve_channel(reduced, eve_regs, ch, out="__eve_bar__")
    return conditional_mutual_information(mapped, xs, ys, ["__eve_bar__"])


# -- search -------------------------------------------------------------------

def _joint_array(d, xs, ys, eve_regs):
    reduced = marginalize(d, xs + ys + eve_regs)
    alphabet = eve_alphabet(reduced, eve_regs)
    xi = [reduced.position(n) for n in xs]
    yi = [reduced.position(n) for n in ys]
    ei = [reduced.position(n) for n in eve_regs]
    xv, yv = {}, {}
    entries = []
    for o, p in reduced.table.items():
        x = tuple(o[i] for i in xi)
        y = tuple(o[i] for i in yi)
        e = COMPOSITE_SEP.join(o[i] for i in ei)
        entries.append((xv.setdefault(x, len(xv)), yv.setdefault(y, len(yv)), e, float(p)))
    ecol = {e: k for k, e in enumerate(alphabet)}
    arr = np.zeros((len(xv), len(yv), len(alphabet)))
    for x, y, e, p in entries:
        arr[x, y, ecol[e]] += p
    return arr, alphabet


def _cmi_array(joint, w):
    """I(X:Y|Ebar) for float joint P[x,y,e] and channel w[o,e]."""
    q = np.einsum("xye,oe->xyo", joint, w)

    def h(a):
        a = a[a > 1e-300]
        return -float(np.sum(a * np.log2(a)))

    return h(q.sum(axis=1)) + h(q.sum(axis=0)) - h(q) - h(q.sum(axis=(0, 1)))


def _rationalize(w, max_den=2**20):
    m, n = w.shape
    cols = []
    for e in range(n):
        col = [Fraction(float(max(x, 0.0))).limit_denominator(max_den) for x in w[:, e]]
        k = int(np.argmax(w[:, e]))
        col[k] = 1 - (sum(col) - col[k])
        if col[k] < 0:
            col = [Fraction(int(i == k)) for i in range(m)]
        cols.append(col)
    return [[cols[e][o] for e in range(n)] for o in range(m)]


def _refine(joint, w0, rng_step, budget, decay=0.5, min_step=1e-9):
    w = w0.copy()
    best = _cmi_array(joint, w)
    evals = 1
    m, n = w.shape
    step = rng_step
    while step > min_step and evals < budget:
        improved = False
        for e in range(n):
            for a in range(m):
                for b in range(m):
                    if a == b or w[a, e] <= 0:
                        continue
                    t = min(step, w[a, e])
                    w[a, e] -= t
                    w[b, e] += t
                    val = _cmi_array(joint, w)
                    evals += 1
                    if val < best - 1e-15:
                        best = val
                        improved = True
                    else:
                        w[a, e] += t
                        w[b, e] -= t
                    if evals >= budget:
                        return w, best, evals
        if not improved:
            step *= decay
    return w, best, evals


def intrinsic_information_search(d: JointDistribution, xs, ys, eve_regs,
                                 strategy: str = "deterministic-exhaustive",
                                 restarts: int = 10, budget: int = 10_000,
                                 seed: int = 0) -> tuple:
    """Upper-bound I(X:Y down Eve) by searching Eve's channels.

    ``"deterministic-exhaustive"`` tries all m**m maps of Eve's alphabet into
    itself in lexicographic order and keeps the first minimum.
    ``"refined"`` additionally runs coordinate-wise simplex perturbation from
    the best deterministic map and ``restarts`` random stochastic starts,
    each capped at ``budget`` evaluations.

    Returns ``(MeasureValue, EveChannel)``.
    """
    if strategy not in ("deterministic-exhaustive", "refined"):
        raise ValueError(f"unknown strategy {strategy!r}")
    xs, ys, eve_regs = _names(xs), _names(ys), _names(eve_regs)
    reduced = marginalize(d, xs + ys + eve_regs)
    alphabet = eve_alphabet(reduced, eve_regs)
    m = len(alphabet)
    if m ** m > budget:
        raise SearchBudgetError(f"{m}**{m} deterministic channels exceed budget {budget}")
    best_val, best_ch = None, None
    for images in itertools.product(range(m), repeat=m):
        ch = EveChannel.deterministic(alphabet, alphabet,
                                      {e: alphabet[k] for e, k in zip(alphabet, images)})
        val = intrinsic_information_upper(reduced, xs, ys, eve_regs, ch)
        if best_val is None or (val.exact and not best_val.exact) \
                or val.value < best_val.value - 1e-12:
            best_val, best_ch = val, ch
        if best_val.exact:
            break
    if strategy == "deterministic-exhaustive" or best_val.exact:
        return best_val, best_ch

    joint, _ = _joint_array(reduced, xs, ys, eve_regs)
    rng = np.random.default_rng(seed)
    starts = [best_ch.to_array()] + [rng.dirichlet(np.ones(m), size=m).T
                                     for _ in range(restarts)]
    for w0 in starts:
        w, val, _ = _refine(joint, w0, 0.25, budget)
        if val < best_val.value - 1e-12:
            ch = EveChannel(alphabet, alphabet, _rationalize(w))
            exact_val = intrinsic_information_upper(reduced, xs, ys, eve_regs, ch)
            if exact_val.value < best_val.value - 1e-12 or exact_val.exact:
                best_val, best_ch = exact_val, ch
    return best_val, best_ch
