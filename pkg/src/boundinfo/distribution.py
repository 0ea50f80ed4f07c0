"""Exact-rational joint distributions over named, owned registers.

Every register has an owner: an honest party label, ``EVE``, or ``PUBLIC``.
Eve's view of a distribution is the set of registers owned by ``EVE`` or
``PUBLIC``, so anything announced during a protocol is automatically part
of what the eavesdropper conditions on.

Probabilities are :class:`fractions.Fraction` throughout. Symbols are
strings; bits are ``"0"`` and ``"1"``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    AlphabetError,
    NameCollisionError,
    NormalizationError,
    OwnershipError,
    ShapeError,
    UnknownRegisterError,
    ZeroProbabilityError,
)

EVE = "eve"
PUBLIC = "public"
BITS = ("0", "1")
MAX_ROWS = 2**24

Outcome = tuple


@dataclass(frozen=True)
class RegisterSpec:
    name: str
    alphabet: tuple
    owner: str

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(str(s) for s in self.alphabet))
        if not self.alphabet:
            raise AlphabetError(f"register {self.name!r} has an empty alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise AlphabetError(f"register {self.name!r} repeats alphabet symbols")

    @property
    def is_honest(self) -> bool:
        return self.owner not in (EVE, PUBLIC)

    @property
    def is_binary(self) -> bool:
        return set(self.alphabet) == set(BITS)


def bit(name: str, owner: str | None = None) -> RegisterSpec:
    """Binary register; owner defaults to the register name."""
    return RegisterSpec(name, BITS, owner if owner is not None else name)


class JointDistribution:
    """Immutable probability table over an ordered list of registers.

    Zero-probability outcomes are never stored. Construction validates
    alphabets and exact normalization.
    """

    __slots__ = ("_registers", "_table", "_index")

    def __init__(self, registers: Sequence[RegisterSpec], table: Mapping[tuple, Fraction],
                 _trusted: bool = False):
        registers = tuple(registers)
        names = [r.name for r in registers]
        if len(set(names)) != len(names):
            raise NameCollisionError(f"duplicate register names in {names}")
        self._registers = registers
        self._index = {n: i for i, n in enumerate(names)}
        if _trusted:
            self._table = dict(table)
            return
        clean = {}
        alphabets = [set(r.alphabet) for r in registers]
        for outcome, p in table.items():
            outcome = tuple(str(s) for s in outcome)
            if len(outcome) != len(registers):
                raise AlphabetError(f"outcome {outcome} does not match {len(registers)} registers")
            for sym, alpha, reg in zip(outcome, alphabets, registers):
                if sym not in alpha:
                    raise AlphabetError(f"symbol {sym!r} not in alphabet of {reg.name!r}")
            p = Fraction(p)
            if p < 0:
                raise NormalizationError(f"negative probability {p} for {outcome}")
            if outcome in clean:
                raise NormalizationError(f"duplicate outcome {outcome}")
            if p:
                clean[outcome] = p
        total = sum(clean.values(), Fraction(0))
        if total != 1:
            raise NormalizationError(f"probabilities sum to {total}, not 1")
        if len(clean) > MAX_ROWS:
            raise ShapeError(f"support of {len(clean)} rows exceeds the {MAX_ROWS} cap")
        self._table = clean

    # -- accessors --------------------------------------------------------

    @property
    def registers(self) -> tuple:
        return self._registers

    @property
    def names(self) -> tuple:
        return tuple(r.name for r in self._registers)

    @property
    def table(self) -> Mapping[tuple, Fraction]:
        return MappingProxyType(self._table)

    def __len__(self):
        return len(self._table)

    def __contains__(self, name):
        return name in self._index

    def register(self, name: str) -> RegisterSpec:
        try:
            return self._registers[self._index[name]]
        except KeyError:
            raise UnknownRegisterError(name) from None

    def position(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownRegisterError(name) from None

    def owner(self, name: str) -> str:
        return self.register(name).owner

    def eve_view(self) -> tuple:
        """Names of registers Eve sees: her own plus everything public."""
        return tuple(r.name for r in self._registers if not r.is_honest)

    def honest(self) -> tuple:
        return tuple(r.name for r in self._registers if r.is_honest)

    def sort_key(self, outcome: tuple) -> tuple:
        return tuple(r.alphabet.index(s) for r, s in zip(self._registers, outcome))

    def rows(self) -> list:
        """(outcome, probability) pairs in lexicographic order."""
        return sorted(self._table.items(), key=lambda kv: self.sort_key(kv[0]))

    def prob(self, **assignment) -> Fraction:
        """Marginal probability of a partial assignment given by keyword."""
        idx = [(self.position(k), str(v)) for k, v in assignment.items()]
        return sum((p for o, p in self._table.items() if all(o[i] == v for i, v in idx)),
                   Fraction(0))

    def as_dicts(self) -> Iterable:
        names = self.names
        for outcome, p in self._table.items():
            yield dict(zip(names, outcome)), p

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self._registers == other._registers and self._table == other._table

    def __hash__(self):
        return hash((self._registers, frozenset(self._table.items())))

    def __repr__(self):
        cols = ", ".join(f"{r.name}@{r.owner}" for r in self._registers)
        return f"JointDistribution([{cols}], rows={len(self._table)})"

    def __str__(self):
        return to_text(self)


# -- construction ---------------------------------------------------------

def make_distribution(registers: Sequence[RegisterSpec],
                      entries: Iterable) -> JointDistribution:
    """Build a distribution from ``(outcome, probability)`` entries.

    Outcomes absent from ``entries`` have probability zero.
    """
    table = {}
    for outcome, p in entries:
        outcome = tuple(str(s) for s in outcome)
        if outcome in table:
            raise NormalizationError(f"duplicate outcome {outcome}")
        table[outcome] = Fraction(p)
    return JointDistribution(registers, table)


def point_distribution(register: RegisterSpec, symbol) -> JointDistribution:
    return JointDistribution([register], {(str(symbol),): Fraction(1)})


def uniform(registers: Sequence[RegisterSpec], outcomes: Sequence[tuple]) -> JointDistribution:
    """Uniform distribution over the listed outcomes."""
    outcomes = list(outcomes)
    w = Fraction(1, len(outcomes))
    return make_distribution(registers, [(o, w) for o in outcomes])


# -- algebra ----------------------------------------------------------------

def product(d1: JointDistribution, d2: JointDistribution) -> JointDistribution:
    """Independent joint distribution; register names must be disjoint."""
    clash = set(d1.names) & set(d2.names)
    if clash:
        raise NameCollisionError(f"registers {sorted(clash)} appear in both factors")
    table = {o1 + o2: p1 * p2
             for o1, p1 in d1.table.items() for o2, p2 in d2.table.items()}
    if len(table) > MAX_ROWS:
        raise ShapeError(f"product support {len(table)} exceeds the {MAX_ROWS} cap")
    return JointDistribution(d1.registers + d2.registers, table, _trusted=True)


def product_all(dists: Iterable[JointDistribution]) -> JointDistribution:
    dists = list(dists)
    out = dists[0]
    for d in dists[1:]:
        out = product(out, d)
    return out


def _check_names(d: JointDistribution, names: Iterable[str]):
    missing = [n for n in names if n not in d]
    if missing:
        raise UnknownRegisterError(f"unknown registers {missing}")


def marginalize(d: JointDistribution, keep: Iterable[str]) -> JointDistribution:
    """Sum out every register not in ``keep``; register order is preserved."""
    keep = set(keep)
    _check_names(d, keep)
    idx = [i for i, n in enumerate(d.names) if n in keep]
    if len(idx) == len(d.names):
        return d
    table = defaultdict(Fraction)
    for outcome, p in d.table.items():
        table[tuple(outcome[i] for i in idx)] += p
    return JointDistribution([d.registers[i] for i in idx], table, _trusted=True)


def discard(d: JointDistribution, drop: Iterable[str]) -> JointDistribution:
    drop = set(drop)
    _check_names(d, drop)
    return marginalize(d, [n for n in d.names if n not in drop])


def post_select(d: JointDistribution,
                predicate: Callable[[dict], bool]) -> tuple:
    """Condition on ``predicate`` (called with a name->symbol dict per row).

    Returns ``(conditional distribution, acceptance probability)``.
    """
    names = d.names
    kept = {o: p for o, p in d.table.items() if predicate(dict(zip(names, o)))}
    accept = sum(kept.values(), Fraction(0))
    if accept == 0:
        raise ZeroProbabilityError("post-selection predicate never holds")
    table = {o: p / accept for o, p in kept.items()}
    return JointDistribution(d.registers, table, _trusted=True), accept


def apply_local_function(d: JointDistribution, owner: str, inputs: Sequence[str],
                         f: Callable, out: str, alphabet: Sequence[str] | None = None,
                         ) -> JointDistribution:
    """Append register ``out`` holding ``f(*input symbols)``, owned by ``owner``.

    Inputs must belong to ``owner`` or be public. Inputs are retained; drop
    them explicitly with :func:`discard`.
    """
    inputs = list(inputs)
    _check_names(d, inputs)
    if out in d:
        raise NameCollisionError(f"register {out!r} already exists")
    for name in inputs:
        o = d.owner(name)
        if o != owner and o != PUBLIC:
            raise OwnershipError(f"{owner!r} cannot read {name!r} (owned by {o!r})")
    idx = [d.position(n) for n in inputs]
    table = {}
    values = set()
    for outcome, p in d.table.items():
        v = str(f(*(outcome[i] for i in idx)))
        values.add(v)
        table[outcome + (v,)] = p
    if alphabet is None:
        alphabet = BITS if values <= set(BITS) else tuple(sorted(values))
    spec = RegisterSpec(out, tuple(alphabet), owner)
    if not values <= set(spec.alphabet):
        raise AlphabetError(f"f produced {sorted(values - set(spec.alphabet))} outside {spec.alphabet}")
    return JointDistribution(d.registers + (spec,), table, _trusted=True)


def _with_registers(d: JointDistribution, registers) -> JointDistribution:
    return JointDistribution(registers, d.table, _trusted=True)


def reown(d: JointDistribution, names: Iterable[str], owner: str) -> JointDistribution:
    """Transfer ownership; joining parties is a re-own to a composite label."""
    names = set(names)
    _check_names(d, names)
    regs = [RegisterSpec(r.name, r.alphabet, owner) if r.name in names else r
            for r in d.registers]
    return _with_registers(d, regs)


def announce(d: JointDistribution, register: str) -> JointDistribution:
    """Make a register public, hence part of Eve's view. Marginals are unchanged."""
    return reown(d, [register], PUBLIC)


def rename(d: JointDistribution, mapping: Mapping[str, str]) -> JointDistribution:
    _check_names(d, mapping)
    regs = [RegisterSpec(mapping.get(r.name, r.name), r.alphabet, r.owner) for r in d.registers]
    return _with_registers(d, regs)


def relabel_symbols(d: JointDistribution, register: str,
                    mapping: Mapping[str, str]) -> JointDistribution:
    """Apply an injective symbol map to one register."""
    i = d.position(register)
    r = d.register(register)
    if len(set(mapping.values())) != len(mapping):
        raise AlphabetError("symbol relabeling must be injective")
    alphabet = tuple(mapping.get(s, s) for s in r.alphabet)
    table = {o[:i] + (mapping.get(o[i], o[i]),) + o[i + 1:]: p for o, p in d.table.items()}
    regs = list(d.registers)
    regs[i] = RegisterSpec(r.name, alphabet, r.owner)
    return JointDistribution(regs, table, _trusted=True)


def reorder(d: JointDistribution, order: Sequence[str]) -> JointDistribution:
    order = list(order)
    if sorted(order) != sorted(d.names):
        raise UnknownRegisterError(f"{order} is not a permutation of {list(d.names)}")
    idx = [d.position(n) for n in order]
    table = {tuple(o[i] for i in idx): p for o, p in d.table.items()}
    return JointDistribution([d.registers[i] for i in idx], table, _trusted=True)


def merge_registers(d: JointDistribution, names: Sequence[str], out: str,
                    sep: str = ",") -> JointDistribution:
    """Replace ``names`` by one register over the joined product alphabet.

    All merged registers must share an owner; the merged register takes the
    position of the first one.
    """
    names = list(names)
    _check_names(d, names)
    owners = {d.owner(n) for n in names}
    if len(owners) != 1:
        raise OwnershipError(f"cannot merge registers with owners {sorted(owners)}")
    if out in d and out not in names:
        raise NameCollisionError(f"register {out!r} already exists")
    idx = [d.position(n) for n in names]
    first = min(idx)
    alphabet = tuple(sep.join(t) for t in itertools.product(
        *(d.register(n).alphabet for n in names)))
    regs, cols = [], []
    for i, r in enumerate(d.registers):
        if i == first:
            regs.append(RegisterSpec(out, alphabet, owners.pop()))
            cols.append(None)
        elif i not in idx:
            regs.append(r)
            cols.append(i)
    table = {}
    for o, p in d.table.items():
        merged = sep.join(o[i] for i in idx)
        table[tuple(merged if c is None else o[c] for c in cols)] = p
    return JointDistribution(regs, table, _trusted=True)


def drop_public(d: JointDistribution) -> JointDistribution:
    """Marginal without announcement registers."""
    return marginalize(d, [r.name for r in d.registers if r.owner != PUBLIC])


# -- comparison ---------------------------------------------------------------

def table_dict(d: JointDistribution) -> dict:
    """Order-free view: frozenset of (name, symbol) pairs -> probability."""
    names = d.names
    return {frozenset(zip(names, o)): p for o, p in d.table.items()}


def tables_equal(d1: JointDistribution, d2: JointDistribution) -> bool:
    """Same register names and identical tables, ignoring order and ownership."""
    if set(d1.names) != set(d2.names):
        return False
    return table_dict(d1) == table_dict(d2)


def permute_check(d1: JointDistribution, d2: JointDistribution,
                  bijection: Mapping[str, str]) -> bool:
    """True iff renaming ``d1``'s registers by ``bijection`` yields ``d2``'s table.

    Names missing from ``bijection`` map to themselves.
    """
    full = {n: bijection.get(n, n) for n in d1.names}
    if len(set(full.values())) != len(full):
        return False
    for src, dst in full.items():
        if dst not in d2 or set(d1.register(src).alphabet) != set(d2.register(dst).alphabet):
            return False
    return tables_equal(rename(d1, full), d2)


def equal_up_to_relabel(d1: JointDistribution, d2: JointDistribution,
                        register: str) -> dict | None:
    """Find a symbol bijection on ``register`` making the tables equal.

    Returns the mapping ``d1 symbol -> d2 symbol`` or ``None``.
    """
    if set(d1.names) != set(d2.names):
        return None
    a1 = d1.register(register).alphabet
    a2 = d2.register(register).alphabet
    if len(a1) != len(a2):
        return None
    # match symbols by their conditional slice; all slices must be distinct
    def slices(d, alpha):
        i = d.position(register)
        others = [n for n in d.names if n != register]
        oi = [d.position(n) for n in others]
        out = {s: {} for s in alpha}
        for o, p in d.table.items():
            out[o[i]][frozenset(zip(others, (o[k] for k in oi)))] = p
        return {s: frozenset(v.items()) for s, v in out.items()}

    s1, s2 = slices(d1, a1), slices(d2, a2)
    inverse = defaultdict(list)
    for s, key in s2.items():
        inverse[key].append(s)
    mapping = {}
    for s, key in s1.items():
        if not inverse.get(key):
            return None
        mapping[s] = inverse[key].pop(0)
    return mapping


# -- secrecy predicates ---------------------------------------------------------

def factorizes(d: JointDistribution, xs: Sequence[str], ys: Sequence[str]) -> bool:
    """Exact test of P(x, y) == P(x) P(y) over the full product of supports."""
    xs, ys = list(xs), list(ys)
    _check_names(d, xs + ys)
    if not xs or not ys:
        return True
    xi = [d.position(n) for n in xs]
    yi = [d.position(n) for n in ys]
    pxy = defaultdict(Fraction)
    px = defaultdict(Fraction)
    py = defaultdict(Fraction)
    for o, p in d.table.items():
        x = tuple(o[i] for i in xi)
        y = tuple(o[i] for i in yi)
        pxy[x, y] += p
        px[x] += p
        py[y] += p
    if len(pxy) != len(px) * len(py):
        return False
    return all(pxy[x, y] == px[x] * py[y] for x, y in pxy)


def _is_secret_key(d: JointDistribution, parties: Sequence[str]) -> bool:
    parties = list(parties)
    _check_names(d, parties)
    if len(set(parties)) != len(parties):
        return False
    for name in parties:
        r = d.register(name)
        if not (r.is_honest and r.is_binary):
            return False
    key = marginalize(d, parties)
    idx = [key.position(n) for n in parties]
    half = Fraction(1, 2)
    want = {tuple("0" for _ in idx): half, tuple("1" for _ in idx): half}
    got = {tuple(o[i] for i in idx): p for o, p in key.table.items()}
    if got != want:
        return False
    return factorizes(d, parties, d.eve_view())


def is_sbit(d: JointDistribution, x: str, y: str) -> bool:
    """Perfectly correlated uniform bit pair, independent of Eve's view."""
    return _is_secret_key(d, [x, y])


def is_multipartite_sbit(d: JointDistribution, parties: Sequence[str]) -> bool:
    """All-equal uniform bits across ``parties``, independent of Eve's view."""
    if len(parties) < 2:
        return False
    return _is_secret_key(d, parties)


# -- serialization --------------------------------------------------------------

def frac_str(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def to_json_obj(d: JointDistribution) -> dict:
    return {
        "registers": [{"name": r.name, "owner": r.owner, "alphabet": list(r.alphabet)}
                      for r in d.registers],
        "entries": [{"outcome": list(o), "p": frac_str(p)} for o, p in d.rows()],
    }


def to_json(d: JointDistribution, **kwargs) -> str:
    return json.dumps(to_json_obj(d), **kwargs)


def from_json_obj(obj: Mapping) -> JointDistribution:
    regs = [RegisterSpec(r["name"], tuple(r["alphabet"]), r["owner"]) for r in obj["registers"]]
    return make_distribution(regs, [(e["outcome"], Fraction(e["p"])) for e in obj["entries"]])


def from_json(text: str) -> JointDistribution:
    return from_json_obj(json.loads(text))


def to_csv(d: JointDistribution) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(d.names) + ["p"])
    for o, p in d.rows():
        w.writerow(list(o) + [frac_str(p)])
    return buf.getvalue()


def to_text(d: JointDistribution) -> str:
    header = list(d.names) + ["p"]
    body = [list(o) + [frac_str(p)] for o, p in d.rows()]
    widths = [max(len(str(row[k])) for row in [header] + body) for k in range(len(header))]
    fmt = "  ".join("{:>%d}" % w for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*row) for row in body]
    return "\n".join(lines)


def all_outcomes(registers: Sequence[RegisterSpec]):
    return itertools.product(*(r.alphabet for r in registers))
