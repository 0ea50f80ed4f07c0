"""Reference probability tables, written out row by row.

These are fixtures only. Protocol code never reads them; it builds its
inputs from rules, and tests compare protocol checkpoints against these.

Rows are written as templates over free bits ``i`` and ``j``: the token
``i+`` stands for ``i + 1 mod 2``. Each template is expanded over every
value of the free bits that appear in the table.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .distribution import BITS, EVE, RegisterSpec, bit, make_distribution
from .errors import UnknownTableError

EPS = ("e1", "e2", "e3", "e4")
FS = ("f1", "f2", "f3", "f4")


def _expand(columns, owners, templates, eve_alphabets, free=("i", "j"), fixed=None):
    fixed = dict(fixed or {})
    free = [v for v in free if v not in fixed]
    regs = []
    for name, owner in zip(columns, owners):
        if owner == EVE:
            regs.append(RegisterSpec(name, eve_alphabets[name], EVE))
        else:
            regs.append(bit(name, owner))
    rows = []
    for values in itertools.product((0, 1), repeat=len(free)):
        env = dict(zip(free, values), **fixed)
        for template in templates:
            row = []
            for tok in template.split():
                if tok in eve_alphabets.get("__symbols__", ()):
                    row.append(tok)
                    continue
                base = tok[:-1] if tok.endswith("+") else tok
                total = 1 if tok.endswith("+") else 0
                for part in base.split("+"):
                    total += env[part] if part in env else int(part)
                row.append(BITS[total % 2])
            rows.append(tuple(row))
    w = Fraction(1, len(rows))
    return make_distribution(regs, [(r, w) for r in rows])


_EVE1 = {"Eve": EPS, "Eve1": EPS, "Eve2": FS, "__symbols__": EPS + FS}


def table_7():
    """Four-party bound-information table, columns A C B D Eve."""
    rows = [
        ("0", "0", "0", "0", "e1"),
        ("0", "0", "1", "1", "e2"),
        ("1", "1", "0", "0", "e2"),
        ("1", "1", "1", "1", "e1"),
        ("0", "1", "0", "1", "e3"),
        ("0", "1", "1", "0", "e4"),
        ("1", "0", "0", "1", "e4"),
        ("1", "0", "1", "0", "e3"),
    ]
    regs = [bit("A"), bit("C"), bit("B"), bit("D"), RegisterSpec("Eve", EPS, EVE)]
    return make_distribution(regs, [(r, Fraction(1, 8)) for r in rows])


def table_8():
    """The bound-information table conditioned on B == D."""
    rows = [
        ("0", "0", "0", "0", "e1"),
        ("0", "0", "1", "1", "e2"),
        ("1", "1", "0", "0", "e2"),
        ("1", "1", "1", "1", "e1"),
    ]
    regs = [bit("A"), bit("C"), bit("B"), bit("D"), RegisterSpec("Eve", EPS, EVE)]
    return make_distribution(regs, [(r, Fraction(1, 4)) for r in rows])


def table_20():
    """First compact copy: A1 C1 B1 D Eve1."""
    return _expand(
        ["A1", "C1", "B1", "D", "Eve1"], ["A", "C", "B", "D", EVE],
        ["i i i i e1", "i i i+ i+ e2", "i i+ i i+ e3", "i i+ i+ i e4"],
        _EVE1, free=("i",))


def table_21():
    """Second compact copy: A2 B2 C2 E Eve2."""
    return _expand(
        ["A2", "B2", "C2", "E", "Eve2"], ["A", "B", "C", "E", EVE],
        ["j j j j f1", "j j j+ j+ f2", "j j+ j j+ f3", "j j+ j+ j f4"],
        _EVE1, free=("j",))


def table_10():
    """Two-copy product, 64 rows: A1 A2 B1 B2 C1 C2 D E Eve1 Eve2."""
    templates = [
        "i j i  j  i  j  i  j  e1 f1",
        "i j i  j  i  j+ i  j+ e1 f2",
        "i j i  j+ i  j  i  j+ e1 f3",
        "i j i  j+ i  j+ i  j  e1 f4",
        "i j i+ j  i  j  i+ j  e2 f1",
        "i j i+ j  i  j+ i+ j+ e2 f2",
        "i j i+ j+ i  j  i+ j+ e2 f3",
        "i j i+ j+ i  j+ i+ j  e2 f4",
        "i j i  j  i+ j  i+ j  e3 f1",
        "i j i  j  i+ j+ i+ j+ e3 f2",
        "i j i  j+ i+ j  i+ j+ e3 f3",
        "i j i  j+ i+ j+ i+ j  e3 f4",
        "i j i+ j  i+ j  i  j  e4 f1",
        "i j i+ j  i+ j+ i  j+ e4 f2",
        "i j i+ j+ i+ j  i  j+ e4 f3",
        "i j i+ j+ i+ j+ i  j  e4 f4",
    ]
    return _expand(
        ["A1", "A2", "B1", "B2", "C1", "C2", "D", "E", "Eve1", "Eve2"],
        ["A", "A", "B", "B", "C", "C", "D", "E", EVE, EVE],
        templates, _EVE1)


def table_11():
    """After Alice's one-time pad: B1 B2 C1' C2 D E Eve1 Eve2."""
    templates = [
        "i  j  j  j  i  j  e1 f1",
        "i  j  j  j+ i  j+ e1 f2",
        "i  j+ j  j  i  j+ e1 f3",
        "i  j+ j  j+ i  j  e1 f4",
        "i+ j  j  j  i+ j  e2 f1",
        "i+ j  j  j+ i+ j+ e2 f2",
        "i+ j+ j  j  i+ j+ e2 f3",
        "i+ j+ j  j+ i+ j  e2 f4",
        "i  j  j+ j  i+ j  e3 f1",
        "i  j  j+ j+ i+ j+ e3 f2",
        "i  j+ j+ j  i+ j+ e3 f3",
        "i  j+ j+ j+ i+ j  e3 f4",
        "i+ j  j+ j  i  j  e4 f1",
        "i+ j  j+ j+ i  j+ e4 f2",
        "i+ j+ j+ j  i  j+ e4 f3",
        "i+ j+ j+ j+ i  j  e4 f4",
    ]
    return _expand(
        ["B1", "B2", "C1'", "C2", "D", "E", "Eve1", "Eve2"],
        ["B", "B", "C", "C", "D", "E", EVE, EVE],
        templates, _EVE1)


def table_22():
    """After Bob's one-time pad, explicit form: C1' C2 D' E Eve1 Eve2."""
    templates = [
        "j  j  j  j  e1 f1",
        "j  j+ j  j+ e1 f2",
        "j  j  j+ j+ e1 f3",
        "j  j+ j+ j  e1 f4",
        "j  j  j  j  e2 f1",
        "j  j+ j  j+ e2 f2",
        "j  j  j+ j+ e2 f3",
        "j  j+ j+ j  e2 f4",
        "j+ j  j+ j  e3 f1",
        "j+ j+ j+ j+ e3 f2",
        "j+ j  j  j+ e3 f3",
        "j+ j+ j  j  e3 f4",
        "j+ j  j+ j  e4 f1",
        "j+ j+ j+ j+ e4 f2",
        "j+ j  j  j+ e4 f3",
        "j+ j+ j  j  e4 f4",
    ]
    return _expand(
        ["C1'", "C2", "D'", "E", "Eve1", "Eve2"],
        ["C", "C", "D", "E", EVE, EVE],
        templates, _EVE1, free=("j",))


def table_12():
    """Compact form after Bob's one-time pad, one repeated block.

    The same four-row block is listed for every Eve1 symbol. For e3/e4 the
    explicit form :func:`table_22` pairs these rows with f-labels swapped
    (f1<->f2, f3<->f4), so the two agree only up to a relabeling of Eve's
    composite symbol.
    """
    block = ["j j j j {} f1", "j j+ j j+ {} f2", "j j j+ j+ {} f3", "j j+ j+ j {} f4"]
    return _expand(
        ["C1'", "C2", "D'", "E", "Eve1", "Eve2"],
        ["C", "C", "D", "E", EVE, EVE],
        [row.format(e) for e in EPS for row in block], _EVE1, free=("j",))


def table_17(s):
    """After each sbit holder replaces its bit by s + i_k: A C B D Eve, fixed s."""
    return _expand(
        ["A", "C", "B", "D", "Eve"], ["A", "C", "B", "D", EVE],
        ["s+i s+i s+i i e1", "s+i s+i s+i+ i+ e2",
         "s+i s+i+ s+i i+ e3", "s+i s+i+ s+i+ i e4"],
        {"Eve": EPS, "__symbols__": EPS}, free=("i",), fixed={"s": int(s)})


def table_18(s):
    """After David adds the announced parities to his bit, fixed s."""
    def rows():
        for i in (0, 1):
            for a, c, b, d, e in [(0, 0, 0, 0, "e1"), (0, 0, 1, 1, "e2"),
                                  (0, 1, 0, 1, "e3"), (0, 1, 1, 0, "e4")]:
                pa, pc, pb = (s + i + a) % 2, (s + i + c) % 2, (s + i + b) % 2
                v = (pa + pb + pc) % 2
                yield (BITS[pa], BITS[pc], BITS[pb], BITS[(i + d + v) % 2], e)
    regs = [bit("A"), bit("C"), bit("B"), bit("D"), RegisterSpec("Eve", EPS, EVE)]
    return make_distribution(regs, [(r, Fraction(1, 8)) for r in rows()])


TABLES = {
    "smolin": table_7,
    "unlock": table_8,
    "prob1": table_10,
    "prob2": table_11,
    "sprob3": table_12,
    "csec": lambda: table_17(0),
    "csec2": lambda: table_18(0),
    "appendixA-1": table_20,
    "appendixA-2": table_21,
    "appendixB": table_22,
}

# dprob is the five-copy product; built on demand by the protocol module


def get_table(name):
    if name == "dprob":
        from .protocols import symmetrized_five
        return symmetrized_five()
    try:
        return TABLES[name]()
    except KeyError:
        raise UnknownTableError(f"unknown table {name!r}; choose from "
                                f"{sorted(TABLES) + ['dprob']}") from None
