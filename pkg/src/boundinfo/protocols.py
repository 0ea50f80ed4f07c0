"""Classical LOPC protocols over bound information.

Each driver threads an immutable :class:`JointDistribution` through local
functions and public announcements and records named checkpoints in a
:class:`ProtocolTranscript`. Announced registers become ``PUBLIC`` and so
stay in Eve's view for every later check.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import distribution as dc
from .distribution import (
    BITS,
    EVE,
    PUBLIC,
    JointDistribution,
    RegisterSpec,
    announce,
    apply_local_function,
    bit,
    discard,
    is_multipartite_sbit,
    is_sbit,
    make_distribution,
    marginalize,
    post_select,
    product,
    product_all,
    relabel_symbols,
    rename,
)
from .errors import DisconnectedGraphError, OwnershipError, ShapeError

EPS = ("e1", "e2", "e3", "e4")
FS = ("f1", "f2", "f3", "f4")
FIVE_PARTIES = ("A", "B", "C", "D", "E")


def xor(*bits):
    return BITS[sum(int(b) for b in bits) % 2]


def flip(b):
    return BITS[1 - int(b)]


class PairTarget(NamedTuple):
    holder1: str
    holder2: str


@dataclass(frozen=True)
class Step:
    actor: str
    op: str
    announced: tuple = ()
    snapshot: str | None = None


@dataclass
class ProtocolTranscript:
    """Ordered local operations and announcements, plus named checkpoints."""

    steps: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)

    def record(self, actor, op, announced=(), snapshot=None, dist=None):
        if snapshot is not None:
            self.snapshots[snapshot] = dist
        self.steps.append(Step(actor, op, tuple(announced), snapshot))

    def checkpoint(self, name, dist):
        self.record("-", "checkpoint", (), name, dist)

    def announced(self):
        return [r for s in self.steps for r in s.announced]

    def extend(self, other, prefix=""):
        for s in other.steps:
            name = prefix + s.snapshot if s.snapshot else None
            self.steps.append(Step(s.actor, s.op, s.announced, name))
            if name:
                self.snapshots[name] = other.snapshots[s.snapshot]

    def validate(self):
        """Every announced register is public in each later snapshot."""
        seen = []
        for s in self.steps:
            seen.extend(s.announced)
            if s.snapshot:
                d = self.snapshots[s.snapshot]
                for r in seen:
                    if r in d and d.owner(r) != PUBLIC:
                        return False
                if sum(d.table.values(), Fraction(0)) != 1:
                    return False
        return True

    def to_json_obj(self):
        return {
            "steps": [{"actor": s.actor, "op": s.op, "announced": list(s.announced),
                       "snapshot": s.snapshot} for s in self.steps],
            "snapshots": {k: dc.to_json_obj(v) for k, v in self.snapshots.items()},
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_obj(), **kwargs)


# -- the bound-information tables --------------------------------------------

def smolin_table() -> JointDistribution:
    """Measured Smolin distribution, registers A C B D Eve.

    Honest bits are uniform over even-parity strings; Eve learns which
    complementary pair the string lies in, encoded by (A+C, A+B).
    """
    rows = []
    for a, c, b in ((a, c, b) for a in (0, 1) for c in (0, 1) for b in (0, 1)):
        d = (a + b + c) % 2
        eve = EPS[2 * ((a + c) % 2) + (a + b) % 2]
        rows.append(((BITS[a], BITS[c], BITS[b], BITS[d], eve), Fraction(1, 8)))
    regs = [bit("A"), bit("C"), bit("B"), bit("D"), RegisterSpec("Eve", EPS, EVE)]
    return make_distribution(regs, rows)


def _copy_of(base, names, owners, eve, symbols=None):
    d = rename(base, dict(zip(["A", "C", "B", "D", "Eve"], names + [eve])))
    d = dc.reown(d, [eve], EVE)
    for n, o in zip(names, owners):
        d = dc.reown(d, [n], o)
    if symbols:
        d = relabel_symbols(d, eve, dict(zip(EPS, symbols)))
    return d


def compact_table(copy: int) -> JointDistribution:
    """One labelled copy of the bound-information table.

    Copy 1 lives on A1 C1 B1 D with Eve1; copy 2 on A2 B2 C2 E with Eve2
    over symbols f1..f4.
    """
    base = smolin_table()
    if copy == 1:
        return _copy_of(base, ["A1", "C1", "B1", "D"], ["A", "C", "B", "D"], "Eve1")
    if copy == 2:
        return _copy_of(base, ["A2", "B2", "C2", "E"], ["A", "B", "C", "E"], "Eve2", FS)
    raise ValueError("copy must be 1 or 2")


# -- building blocks ----------------------------------------------------------

def classical_teleport(d: JointDistribution, sender: str, msg: str, sender_key: str,
                       receiver: str, receiver_key: str, out: str,
                       transcript: ProtocolTranscript | None = None):
    """One-time pad ``msg`` from sender to receiver over a shared key pair.

    The sender announces ``msg + sender_key``; the receiver stores
    ``announcement + receiver_key`` in ``out``. Message and both keys are
    consumed (marginalized out) unless already public. Returns
    ``(distribution, transcript)``.
    """
    transcript = ProtocolTranscript() if transcript is None else transcript
    for name, who in ((msg, sender), (sender_key, sender), (receiver_key, receiver)):
        owner = d.owner(name)
        if owner not in (who, PUBLIC):
            raise OwnershipError(f"{name!r} is owned by {owner!r}, expected {who!r}")
    pad = f"{msg}^{sender_key}"
    d = apply_local_function(d, sender, [msg, sender_key], xor, pad)
    d = announce(d, pad)
    transcript.record(sender, f"announce {pad} = {msg} xor {sender_key}", [pad])
    d = apply_local_function(d, receiver, [pad, receiver_key], xor, out)
    transcript.record(receiver, f"{out} = {pad} xor {receiver_key}",
                      snapshot=f"teleport:{out}:before-discard", dist=d)
    # public registers stay: Eve does not forget what she has heard
    consumed = [n for n in (msg, sender_key, receiver_key) if d.owner(n) != PUBLIC]
    d = discard(d, consumed)
    transcript.record(receiver, f"consume {', '.join(consumed)}")
    return d, transcript


def _flip_if(d, owner, target, control, when):
    """Owner flips ``target`` when public ``control`` equals ``when``."""
    tmp = target + "~"
    d = apply_local_function(d, owner, [target, control],
                             lambda t, c: flip(t) if c == when else t, tmp)
    return rename(discard(d, [target]), {tmp: target})


def _shape_check(d, parties):
    honest = [r for r in d.registers if r.is_honest]
    eve = [r for r in d.registers if r.owner == EVE]
    if len(honest) != 4 or not eve or not all(r.is_binary for r in honest):
        raise ShapeError("expected four honest binary registers and an Eve register")
    missing = set(parties) - {r.name for r in honest}
    if missing:
        raise ShapeError(f"parties {sorted(missing)} not among the honest registers")


@dataclass(frozen=True)
class Branch:
    label: str
    dist: JointDistribution
    acceptance: Fraction
    sbit: bool


def unlock(d: JointDistribution, joiners=("B", "D"), targets=("A", "C")):
    """Two parties join, announce whether their bits agree, and unlock the rest.

    In the "unequal" branch the first target flips its bit. Returns
    ``([equal-branch, unequal-branch], transcript)``.
    """
    joiners, targets = PairTarget(*joiners), PairTarget(*targets)
    _shape_check(d, list(joiners) + list(targets))
    if set(joiners) & set(targets) or joiners[0] == joiners[1] or targets[0] == targets[1]:
        raise ShapeError("joiners and targets must be four distinct parties")
    t = ProtocolTranscript()
    joint = "+".join(joiners)
    d = dc.reown(d, joiners, joint)
    t.record(joint, f"{joiners[0]} and {joiners[1]} join")
    eq = f"{joiners[0]}={joiners[1]}"
    d = apply_local_function(d, joint, list(joiners), lambda x, y: BITS[x == y], eq)
    d = announce(d, eq)
    t.record(joint, f"announce {eq}", [eq], snapshot="announced", dist=d)

    branches = []
    same, p_same = post_select(d, lambda r: r[eq] == "1")
    t.record("-", "branch equal", snapshot="equal", dist=same)
    branches.append(Branch("equal", same, p_same, is_sbit(same, *targets)))

    diff, p_diff = post_select(d, lambda r: r[eq] == "0")
    diff = _flip_if(diff, diff.owner(targets[0]), targets[0], eq, "0")
    t.record(targets[0], f"flip {targets[0]}", snapshot="unequal", dist=diff)
    branches.append(Branch("unequal", diff, p_diff, is_sbit(diff, *targets)))
    return branches, t


def _superactivate(d, t1, t2, r, h1, h2, copy1_regs, copy2_regs, transcript):
    """Shared driver: t1, t2 pad their copy-2 bits to r and h1, r announces equality."""
    # copy1_regs: registers of t1, t2, r, h1 in the first copy
    # copy2_regs: registers of t1, t2, r, h2 in the second copy
    a1, b1, c1, dd = copy1_regs
    a2, b2, c2, e = copy2_regs
    c1p, dp = c1 + "'", dd + "'"
    d, _ = classical_teleport(d, t1, a2, a1, r, c1, c1p, transcript)
    transcript.checkpoint("after-first-pad", d)
    d, _ = classical_teleport(d, t2, b2, b1, h1, dd, dp, transcript)
    transcript.checkpoint("after-second-pad", d)
    eq = f"{c1p}={c2}"
    d = apply_local_function(d, r, [c1p, c2], lambda x, y: BITS[x == y], eq)
    d = announce(d, eq)
    transcript.record(r, f"announce whether {c1p} == {c2}", [eq])
    d = _flip_if(d, h1, dp, eq, "0")
    transcript.record(h1, f"flip {dp} if {eq} is 0", snapshot="final", dist=d)
    return d, dp, e


def superactivate_pair():
    """Two-copy activation: D and E end with an sbit.

    Checkpoints: ``table-10`` (the product), ``table-11`` (after Alice's
    pad), ``table-12`` (after Bob's pad) and ``final``. Returns
    ``(final distribution, transcript)``.
    """
    t = ProtocolTranscript()
    d = product(compact_table(1), compact_table(2))
    t.checkpoint("table-10", d)
    d, dp, e = _superactivate(d, "A", "B", "C", "D", "E",
                              ("A1", "B1", "C1", "D"), ("A2", "B2", "C2", "E"), t)
    t.snapshots["table-11"] = t.snapshots.pop("after-first-pad")
    t.snapshots["table-12"] = t.snapshots.pop("after-second-pad")
    t.steps = [Step(s.actor, s.op, s.announced,
                    {"after-first-pad": "table-11", "after-second-pad": "table-12"}
                    .get(s.snapshot, s.snapshot)) for s in t.steps]
    return d, t


# -- five copies ---------------------------------------------------------------

def five_copy_layout():
    """Copy index -> sorted parties; copy k omits party ``E, D, C, B, A`` in turn."""
    return {k + 1: tuple(p for p in FIVE_PARTIES if p != omit)
            for k, omit in enumerate(reversed(FIVE_PARTIES))}


def symmetrized_five() -> JointDistribution:
    """Product of five four-party copies, one for each omitted party.

    Party P's bit in copy k is register ``Pk``; Eve holds ``Eve1..Eve5``.
    """
    base = smolin_table()
    copies = []
    for k, parties in five_copy_layout().items():
        # table columns are A C B D; assign the sorted parties to A B C D
        slots = dict(zip(["A", "B", "C", "D"], parties))
        names = [f"{slots[c]}{k}" for c in ["A", "C", "B", "D"]]
        owners = [slots[c] for c in ["A", "C", "B", "D"]]
        copies.append(_copy_of(base, names, owners, f"Eve{k}"))
    return product_all(copies)


def distill_pair_from_five(d: JointDistribution, target):
    """Run the two-copy activation inside the five-copy product for ``target``.

    Uses the copy omitting ``holder2`` and the copy omitting ``holder1``;
    the remaining three parties act as the two padding parties
    (lexicographic) and the announcing party. Returns
    ``(final distribution, sbit, transcript)``.
    """
    h1, h2 = PairTarget(*target)
    if h1 == h2 or h1 not in FIVE_PARTIES or h2 not in FIVE_PARTIES:
        raise ShapeError(f"target must be two distinct parties of {FIVE_PARTIES}")
    layout = five_copy_layout()
    k1 = next(k for k, ps in layout.items() if h2 not in ps)
    k2 = next(k for k, ps in layout.items() if h1 not in ps)
    expected = {f"{p}{k}" for k, ps in layout.items() for p in ps} | \
        {f"Eve{k}" for k in layout}
    if not expected <= set(d.names):
        raise ShapeError("distribution is not the five-copy product")
    t1, t2, r = sorted(set(FIVE_PARTIES) - {h1, h2})
    t = ProtocolTranscript()
    t.record("-", f"use copy {k1} {layout[k1]} and copy {k2} {layout[k2]}")
    d, hp, e = _superactivate(
        d, t1, t2, r, h1, h2,
        (f"{t1}{k1}", f"{t2}{k1}", f"{r}{k1}", f"{h1}{k1}"),
        (f"{t1}{k2}", f"{t2}{k2}", f"{r}{k2}", f"{h2}{k2}"), t)
    return d, is_sbit(d, hp, e), t


# -- distributing a multipartite sbit ------------------------------------------

def distribute_secret(bound_info: JointDistribution | None = None,
                      s_holders: Sequence[str] = ("A", "B", "C"), newcomer: str = "D"):
    """Extend an sbit shared by ``s_holders`` to ``newcomer`` over bound information.

    Each holder announces ``s + i_k``; the newcomer adds the announced
    parities to its own bit. The adjoined sbit lives in ``s_<holder>``
    registers and the newcomer's result in ``s_<newcomer>``.
    Returns ``(final distribution, transcript)`` with checkpoints
    ``table-17``, ``table-18`` and ``final``.
    """
    d = smolin_table() if bound_info is None else bound_info
    s_holders = list(s_holders)
    _shape_check(d, s_holders + [newcomer])
    t = ProtocolTranscript()
    sregs = [bit(f"s_{k}", k) for k in s_holders]
    sbit = make_distribution(sregs, [((b,) * len(sregs), Fraction(1, 2)) for b in BITS])
    d = product(d, sbit)
    t.checkpoint("start", d)
    parities = []
    for k in s_holders:
        cp = f"copy_s_{k}"
        d = apply_local_function(d, k, [f"s_{k}"], lambda x: x, cp)
        par = f"{k}+s"
        d = apply_local_function(d, k, [cp, k], xor, par)
        d = discard(d, [cp])
        parities.append(par)
        t.record(k, f"{par} = s + {k}")
    t.checkpoint("table-17", d)
    for par in parities:
        d = announce(d, par)
    t.record(",".join(s_holders), "announce parities", parities)
    v = f"v_{newcomer}"
    d = apply_local_function(d, newcomer, parities, xor, v)
    out = f"s_{newcomer}"
    d = apply_local_function(d, newcomer, [newcomer, v], xor, out)
    t.record(newcomer, f"{out} = {newcomer} + {v}", snapshot="table-18", dist=d)
    t.checkpoint("final", d)
    return d, t


def secret_view(d: JointDistribution, s_holders=("A", "B", "C"), newcomer="D", s=0,
                stage="table-17"):
    """Project a distribute_secret snapshot onto the reference-table columns, given s.

    ``table-17`` shows the parities in place of the holders' bits and the
    newcomer's raw bit; ``table-18`` shows the newcomer's corrected bit.
    """
    cond, _ = post_select(d, lambda r: r[f"s_{s_holders[0]}"] == BITS[s])
    eve = [n for n in d.names if d.owner(n) == EVE]
    cols = {f"{k}+s": k for k in s_holders}
    if stage == "table-18":
        cols[f"s_{newcomer}"] = newcomer
        view = marginalize(cond, list(cols) + eve)
    else:
        view = marginalize(cond, list(cols) + [newcomer] + eve)
    return rename(view, cols)


# -- multipartite key from pairwise keys -----------------------------------------

def multipartite_from_pairwise(pair_sbits: Sequence[JointDistribution], root=None):
    """Chain pairwise sbits into one shared key by one-time padding.

    Each input holds one pairwise key: two honest binary registers owned
    by different parties. The root samples a fresh bit and pads it along a
    breadth-first spanning tree. The result holds ``key_<party>`` for every
    party reached.
    """
    edges = []
    for pd in pair_sbits:
        honest = [r for r in pd.registers if r.is_honest]
        if len(honest) != 2 or honest[0].owner == honest[1].owner:
            raise ShapeError("each pairwise key needs two honest registers of distinct owners")
        edges.append((honest[0], honest[1]))
    d = product_all(pair_sbits)
    parties = sorted({r.owner for e in edges for r in e})
    adj = {p: [] for p in parties}
    for u, v in edges:
        adj[u.owner].append((v.owner, u.name, v.name))
        adj[v.owner].append((u.owner, v.name, u.name))
    root = parties[0] if root is None else root
    seen, order = {root}, []
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v, ku, kv in adj[u]:
            if v not in seen:
                seen.add(v)
                order.append((u, v, ku, kv))
                queue.append(v)
    if seen != set(parties):
        raise DisconnectedGraphError(f"parties {sorted(set(parties) - seen)} unreachable")
    key = RegisterSpec(f"key_{root}", BITS, root)
    d = product(d, make_distribution([key], [(("0",), Fraction(1, 2)),
                                             (("1",), Fraction(1, 2))]))
    for u, v, ku, kv in order:
        msg = f"key_{u}>{v}"
        d = apply_local_function(d, u, [f"key_{u}"], lambda x: x, msg)
        d, _ = classical_teleport(d, u, msg, ku, v, kv, f"key_{v}")
    return d


def pairwise_sbit(x: str, y: str, owners=None) -> JointDistribution:
    """A fresh perfectly correlated uniform bit pair with an independent Eve."""
    ox, oy = owners or (x, y)
    regs = [bit(x, ox), bit(y, oy)]
    return make_distribution(regs, [(("0", "0"), Fraction(1, 2)), (("1", "1"), Fraction(1, 2))])
