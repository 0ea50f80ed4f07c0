"""Acceptance checks, one function per criterion.

Each check returns a :class:`CriterionResult`. Reference tables come from
a ``fixtures`` mapping (defaults to :mod:`boundinfo.tables`) so a corrupted
fixture makes exactly the checks that read it fail.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import distribution as dc
from . import measures as im
from . import protocols as lp
from . import quantum as qc
from . import tables

TOL = 1e-9


@dataclass
class CriterionResult:
    criterion: str
    expected: str
    observed: str
    passed: bool

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion}: {self.observed}"

    def to_json_obj(self):
        return asdict(self)


def default_fixtures():
    return {
        "table-7": tables.table_7,
        "table-8": tables.table_8,
        "table-10": tables.table_10,
        "table-11": tables.table_11,
        "table-12": tables.table_12,
        "table-17": tables.table_17,
        "table-18": tables.table_18,
        "table-22": tables.table_22,
    }


def cmi_by_definition(d, xs, ys, zs):
    """sum_z P(z) I(X:Y|Z=z), each term from conditional tables directly."""
    xi = [d.position(n) for n in xs]
    yi = [d.position(n) for n in ys]
    zi = [d.position(n) for n in zs]
    groups = defaultdict(list)
    for o, p in d.table.items():
        groups[tuple(o[i] for i in zi)].append((tuple(o[i] for i in xi),
                                                tuple(o[i] for i in yi), float(p)))
    total = 0.0
    for rows in groups.values():
        pz = sum(p for _, _, p in rows)
        px, py, pxy = defaultdict(float), defaultdict(float), defaultdict(float)
        for x, y, p in rows:
            px[x] += p / pz
            py[y] += p / pz
            pxy[x, y] += p / pz
        total += pz * sum(q * math.log2(q / (px[x] * py[y])) for (x, y), q in pxy.items())
    return total


# -- criteria ------------------------------------------------------------------

def check_table_reproduction(fx, tol=TOL, **_):
    t0 = time.perf_counter()
    table7 = fx["table-7"]()
    honest = ["A", "B", "C", "D"]
    canon = qc.purify(qc.smolin_state())
    basis = qc.MeasurementBasis.computational(
        honest + ["Eve"], [2, 2, 2, 2, 4], symbols={"Eve": ["e1", "e2", "e3", "e4"]})
    d1, exact1 = qc.measure(canon, basis)
    basis2 = qc.MeasurementBasis.computational(honest).merged(
        qc.MeasurementBasis({"Eve": qc.pair_eve_basis()}))
    d2, exact2 = qc.measure(qc.smolin_purification(), basis2)
    m1 = dc.equal_up_to_relabel(d1, table7, "Eve")
    m2 = dc.equal_up_to_relabel(d2, table7, "Eve")
    elapsed = time.perf_counter() - t0
    ok = bool(m1 and m2 and exact1 and exact2 and elapsed < 1.0
              and set(d2.table.values()) == {Fraction(1, 8)})
    return CriterionResult(
        "1 table reproduction", "table-7 up to Eve bijection, all p = 1/8, < 1 s",
        f"canonical purification map={m1}, Bell-pair purification map={m2}, "
        f"{elapsed:.3f} s", ok)


def check_undistillability(fx, tol=TOL, **_):
    d = fx["table-7"]()
    eve = d.register("Eve").alphabet
    witness = im.EveChannel.deterministic(eve, eve, {"e1": "e1", "e2": "e1",
                                                     "e3": "e4", "e4": "e4"})
    up = im.intrinsic_information_upper(d, ["A", "C"], ["B", "D"], "Eve", witness)
    cuts = [(["A", "C"], ["B", "D"]), (["A", "B"], ["C", "D"]), (["A", "D"], ["B", "C"])]
    searched = [im.intrinsic_information_search(d, x, y, "Eve")[0] for x, y in cuts]
    ident = im.intrinsic_information_upper(d, ["A", "C"], ["B", "D"], "Eve",
                                           im.EveChannel.identity(eve))
    direct = cmi_by_definition(d, ["A", "C"], ["B", "D"], ["Eve"])
    ok = (up.exact and up.value == 0 and all(v.exact and v.value == 0 for v in searched)
          and abs(ident.value - 1.0) <= tol and abs(direct - 1.0) <= tol)
    return CriterionResult(
        "2 undistillability certificates",
        "witness bound 0 exact; 0 exact on AC:BD, AB:CD, AD:BC; identity CMI 1 bit",
        f"witness={up.value} exact={up.exact}; cuts={[v.value for v in searched]}; "
        f"identity={ident.value:.12f}; direct={direct:.12f}", ok)


def check_unlockability(fx, tol=TOL, **_):
    d = fx["table-7"]()
    table8 = fx["table-8"]()
    runs = {("B", "D"): ("A", "C"), ("A", "C"): ("B", "D"),
            ("A", "B"): ("C", "D"), ("C", "D"): ("A", "B")}
    notes, ok = [], True
    for joiners, targets in runs.items():
        branches, _ = lp.unlock(d, joiners, targets)
        good = all(b.sbit for b in branches) and \
            sum(b.acceptance for b in branches) == 1
        if joiners == ("B", "D"):
            eq = branches[0]
            good &= eq.acceptance == Fraction(1, 2) and \
                dc.tables_equal(dc.drop_public(eq.dist), table8)
        ok &= good
        notes.append(f"{''.join(joiners)}->{''.join(targets)}:{'ok' if good else 'FAIL'}")
    return CriterionResult(
        "3 unlockability", "table-8 at acceptance 1/2; sbit on both branches for each joiner pair",
        ", ".join(notes), ok)


def check_superactivation(fx, tol=TOL, **_):
    final, t = lp.superactivate_pair()
    snaps = t.snapshots
    m10 = dc.tables_equal(snaps["table-10"], fx["table-10"]())
    m11 = dc.tables_equal(dc.drop_public(snaps["table-11"]), fx["table-11"]())
    s12 = dc.drop_public(snaps["table-12"])
    m22 = dc.tables_equal(s12, fx["table-22"]())
    merged = dc.merge_registers(s12, ["Eve1", "Eve2"], "Eve12")
    compact = dc.merge_registers(fx["table-12"](), ["Eve1", "Eve2"], "Eve12")
    m12 = dc.equal_up_to_relabel(merged, compact, "Eve12") is not None
    view = set(final.eve_view())
    need = {"Eve1", "Eve2"} | set(t.announced())
    sbit = dc.is_sbit(final, "D'", "E") and need <= view
    ok = m10 and m11 and m22 and m12 and sbit and t.validate()
    return CriterionResult(
        "4 classical superactivation", "table-10, table-11, table-22 exact; table-12 up to Eve relabel; sbit(D',E)",
        f"table-10={m10} table-11={m11} table-22={m22} table-12~={m12} "
        f"sbit(D',E)={sbit} eve_view={sorted(view)}", ok)


def check_five_copy(fx, tol=TOL, **_):
    t0 = time.perf_counter()
    d = lp.symmetrized_five()
    results = {}
    for pair in itertools.combinations(lp.FIVE_PARTIES, 2):
        _, ok, _ = lp.distill_pair_from_five(d, pair)
        results["".join(pair)] = ok
    elapsed = time.perf_counter() - t0
    ok = len(d) == 32768 and all(results.values()) and elapsed < 30
    return CriterionResult(
        "5 five-copy symmetrization", "sbit for all 10 pairs on 32768 rows, < 30 s",
        f"rows={len(d)} pairs_ok={sum(results.values())}/10 {elapsed:.1f} s", ok)


def check_quantum_superactivation(fx, tol=TOL, **_):
    r = qc.quantum_superactivation()
    dist = r.checkpoint_distance
    fids = [b[-1] for b in r.branches]
    ok = dist < tol and all(abs(f - 1) <= tol for f in fids)
    return CriterionResult(
        "6 quantum superactivation", "checkpoint = Smolin within 1e-9; fidelity 1 every branch",
        f"max entry distance={dist:.2e}; {len(fids)} branches, min fidelity={min(fids):.12f}",
        ok)


def check_ghz_extension(fx, tol=TOL, **_):
    res = qc.ghz_extend()
    k = qc.ghz_kraus()
    compl = float(np.abs(k.completeness() - np.eye(4)).max())
    fids = [b[-1] for b in res.branches]
    uniform = res.exact and len(res.distribution) == 16 and \
        set(res.distribution.table.values()) == {Fraction(1, 16)}
    ok = len(fids) == 16 and all(abs(f - 1) <= tol for f in fids) and uniform and compl <= 1e-12
    return CriterionResult(
        "7 GHZ extension", "16/16 branches fidelity 1; outcomes uniform 1/16; completeness 1e-12",
        f"{sum(abs(f - 1) <= tol for f in fids)}/16 branches at fidelity 1; uniform={uniform}; "
        f"completeness error={compl:.1e}", ok)


def check_secrecy_distribution(fx, tol=TOL, **_):
    final, t = lp.distribute_secret()
    m17 = all(dc.tables_equal(lp.secret_view(t.snapshots["table-17"], s=s), fx["table-17"](s))
              for s in (0, 1))
    m18 = all(dc.tables_equal(lp.secret_view(final, s=s, stage="table-18"), fx["table-18"](s))
              for s in (0, 1))
    pa, pd_ = final.position("s_A"), final.position("s_D")
    david = all(o[pa] == o[pd_] for o in final.table)
    indep = im.conditional_mutual_information(final, ["s_A"], list(final.eve_view()))
    zero = indep.exact and indep.value == 0
    multi = dc.is_multipartite_sbit(final, ["s_A", "s_B", "s_C", "s_D"])
    ok = m17 and m18 and david and zero and multi
    return CriterionResult(
        "8 secrecy distribution", "table-17, table-18; David == s; I(s:EveView)=0 exact; 4-party sbit",
        f"table-17={m17} table-18={m18} david==s={david} I={indep.value} exact={indep.exact} "
        f"multipartite={multi}", ok)


def check_structure(fx, tol=TOL, **_):
    d = fx["table-7"]()
    swaps = [{"A": "B", "B": "A", "C": "D", "D": "C"},
             {"A": "C", "C": "A", "B": "D", "D": "B"},
             {"A": "D", "D": "A", "B": "C", "C": "B"}]
    classical = all(dc.permute_check(d, d, s) for s in swaps)
    rho = qc.smolin_state()
    perms = [("B", "A", "D", "C"), ("C", "D", "A", "B"), ("A", "C", "B", "D")]
    sym = all(np.abs(rho.relabel(dict(zip(rho.labels, p))).reorder(rho.labels).matrix
                     - rho.matrix).max() < tol for p in perms)
    ppt = all(qc.is_ppt(rho, cut) for cut in (["A", "B"], ["A", "C"], ["A", "D"]))
    rng = np.random.default_rng(0)
    inv = True
    for cut in (["A"], ["A", "B"], ["B", "D"], ["C"]):
        m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        op = qc.DensityOperator(rho.labels, rho.dims, m, check=False)
        twice = qc.partial_transpose(qc.partial_transpose(op, cut), cut)
        inv &= bool(np.array_equal(twice.matrix, m))
    ok = classical and sym and ppt and inv
    return CriterionResult(
        "9 structural properties", "table-7 pair-swap invariant; Smolin symmetric, PPT 2:2; PT involution",
        f"table7_swaps={classical} smolin_perms={sym} ppt_2v2={ppt} pt_involution={inv}", ok)


def random_distribution(rng, shape=(2, 2, 3), max_weight=6):
    """Seeded small rational distribution over registers X, Y, Z."""
    regs = [dc.RegisterSpec(n, tuple(str(k) for k in range(s)), o)
            for n, s, o in zip(("X", "Y", "Z"), shape, ("X", "Y", dc.EVE))]
    weights = rng.integers(0, max_weight, size=shape)
    weights.flat[rng.integers(weights.size)] += 1
    total = int(weights.sum())
    entries = [(tuple(str(k) for k in idx), Fraction(int(weights[idx]), total))
               for idx in np.ndindex(*shape)]
    return dc.make_distribution(regs, entries)


def check_measure_sanity(fx, tol=TOL, seed=0, samples=25, **_):
    rng = np.random.default_rng(seed)
    worst, mono, zero_conv = 0.0, True, True
    for _ in range(samples):
        d = random_distribution(rng)
        vals = [im.entropy(d, ["X"]).value, im.mutual_information(d, "X", "Y").value,
                im.conditional_mutual_information(d, "X", "Y", "Z").value]
        worst = min(worst, *vals)
        det, _ = im.intrinsic_information_search(d, "X", "Y", "Z")
        ref, _ = im.intrinsic_information_search(d, "X", "Y", "Z", strategy="refined",
                                                 restarts=2, budget=2000, seed=seed)
        mono &= ref.value <= det.value + tol
    pt = dc.point_distribution(dc.bit("X"), "0")
    zero_conv = im.entropy(pt, ["X"]).value == 0.0
    ok = worst >= -1e-12 and mono and zero_conv
    return CriterionResult(
        "10 measure sanity", "H, I, CMI >= -1e-12; 0 log 0 = 0; refined <= exhaustive + 1e-9",
        f"min value={worst:.3e} monotone={mono} zero_log_zero={zero_conv} ({samples} samples)",
        ok)


CRITERIA = [
    check_table_reproduction,
    check_undistillability,
    check_unlockability,
    check_superactivation,
    check_five_copy,
    check_quantum_superactivation,
    check_ghz_extension,
    check_secrecy_distribution,
    check_structure,
    check_measure_sanity,
]


def run_all(fixtures=None, tol=TOL, seed=0):
    fx = default_fixtures()
    fx.update(fixtures or {})
    out = []
    for check in CRITERIA:
        try:
            out.append(check(fx, tol=tol, seed=seed))
        except Exception as exc:  # a crashing check is a failed check
            out.append(CriterionResult(check.__name__, "no error", repr(exc), False))
    return out
