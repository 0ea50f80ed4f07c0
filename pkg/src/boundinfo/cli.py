"""Command-line front end: ``boundinfo {tables,measures,protocol,verify,export}``.

Exit status is 0 iff every executed check passed, 1 if a check failed and
2 for usage errors. Set ``BOUNDINFO_LOG`` (e.g. ``DEBUG``) for logging.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys

from . import distribution as dc
from . import measures as im
from . import protocols as lp
from . import quantum as qc
from . import tables, verify
from .errors import BoundInfoError, UnknownProtocolError

log = logging.getLogger("boundinfo")

PROTOCOLS = ("unlock", "superactivate", "five-copy", "distribute-secret",
             "quantum-unlock", "quantum-superactivate", "ghz-extend")


def _check(name, ok, detail="", group=None):
    return {"check": name, "pass": bool(ok), "detail": detail, "group": group}


def _match(name, ok):
    return _check(name, ok, "MATCH" if ok else "MISMATCH")


def run_protocol(name, tol=1e-9):
    """Run one driver; returns ``(checks, transcript-json-or-None)``."""
    log.info("running protocol %s", name)
    if name == "unlock":
        branches, t = lp.unlock(tables.table_7(), ("B", "D"), ("A", "C"))
        checks = [_match("table-8", dc.tables_equal(dc.drop_public(branches[0].dist),
                                                    tables.table_8()))]
        checks += [_check(f"sbit(A,C) {b.label} branch", b.sbit, f"acceptance {b.acceptance}")
                   for b in branches]
        return checks, t.to_json_obj()
    if name == "superactivate":
        final, t = lp.superactivate_pair()
        s = t.snapshots
        s12 = dc.drop_public(s["table-12"])
        relabel = dc.equal_up_to_relabel(
            dc.merge_registers(s12, ["Eve1", "Eve2"], "Eve12"),
            dc.merge_registers(tables.table_12(), ["Eve1", "Eve2"], "Eve12"), "Eve12")
        checks = [
            _match("table-10", dc.tables_equal(s["table-10"], tables.table_10())),
            _match("table-11", dc.tables_equal(dc.drop_public(s["table-11"]), tables.table_11())),
            _match("table-12", dc.tables_equal(s12, tables.table_22()) and relabel is not None),
            _check("sbit(D',E)", dc.is_sbit(final, "D'", "E"),
                   "eve view " + ",".join(final.eve_view())),
        ]
        return checks, t.to_json_obj()
    if name == "five-copy":
        d = lp.symmetrized_five()
        checks = []
        for pair in itertools.combinations(lp.FIVE_PARTIES, 2):
            _, ok, _ = lp.distill_pair_from_five(d, pair)
            checks.append(_check(f"sbit({pair[0]},{pair[1]})", ok))
        return checks, None
    if name == "distribute-secret":
        final, t = lp.distribute_secret()
        m17 = all(dc.tables_equal(lp.secret_view(t.snapshots["table-17"], s=s),
                                  tables.table_17(s)) for s in (0, 1))
        m18 = all(dc.tables_equal(lp.secret_view(final, s=s, stage="table-18"),
                                  tables.table_18(s)) for s in (0, 1))
        pa, pd_ = final.position("s_A"), final.position("s_D")
        info = im.conditional_mutual_information(final, ["s_A"], list(final.eve_view()))
        checks = [
            _match("table-17", m17), _match("table-18", m18),
            _check("David bit == s in all branches",
                   all(o[pa] == o[pd_] for o in final.table), group="secret"),
            _check("I(s:EveView)=0 exact", info.exact and info.value == 0, group="secret"),
            _check("multipartite sbit(A,B,C,D)",
                   dc.is_multipartite_sbit(final, ["s_A", "s_B", "s_C", "s_D"])),
        ]
        return checks, t.to_json_obj()
    if name == "quantum-unlock":
        worst, branches = qc.quantum_unlock()
        return ([_check(f"branch psi{i} fidelity {f:.9f}", abs(f - 1) <= tol, f"p={p:.6f}")
                 for i, p, f in branches]
                + [_check("worst fidelity", abs(worst - 1) <= tol, f"{worst:.9f}")]), None
    if name == "quantum-superactivate":
        r = qc.quantum_superactivation()
        fids = [b[-1] for b in r.branches]
        n_ok = sum(abs(f - 1) <= tol for f in fids)
        key = qc.superactivation_key_distribution(r)
        return [
            _check("checkpoint equals Smolin state", r.checkpoint_distance < tol,
                   f"max entry distance {r.checkpoint_distance:.2e}"),
            _check(f"{n_ok}/{len(fids)} branches fidelity {min(fids):.9f}", n_ok == len(fids)),
            _check("sbit(D',E) against announcements", dc.is_sbit(key, "D'", "E")),
        ], None
    if name == "ghz-extend":
        res = qc.ghz_extend()
        fids = [b[-1] for b in res.branches]
        n_ok = sum(abs(f - 1) <= tol for f in fids)
        uniform = res.exact and {str(p) for p in res.distribution.table.values()} == {"1/16"}
        return [
            _check(f"{n_ok}/16 branches fidelity {min(fids):.9f}", n_ok == 16),
            _check("outcomes uniform 1/16", uniform and len(res.distribution) == 16),
        ], None
    raise UnknownProtocolError(f"unknown protocol {name!r}; choose from {PROTOCOLS}")


def _check_line(c):
    if c["detail"] in ("MATCH", "MISMATCH"):
        return f"{c['check']} {c['detail']}"
    detail = f" ({c['detail']})" if c["detail"] else ""
    return f"{c['check']} {'PASS' if c['pass'] else 'FAIL'}{detail}"


def _check_lines(checks):
    """One line per check; consecutive checks sharing a group join with '; '."""
    lines, last = [], None
    for c in checks:
        if c["group"] is not None and c["group"] == last:
            lines[-1] += "; " + _check_line(c)
        else:
            lines.append(_check_line(c))
        last = c["group"]
    return lines


def _split_cut(cut):
    """``"AC:BD"`` or ``"A1,C1:B1,D"`` -> two register lists."""
    sides = cut.split(":")
    if len(sides) != 2:
        raise ValueError(f"cut must look like X:Y, got {cut!r}")
    return [s.split(",") if "," in s else list(s) for s in sides]


def measures_report(table, cut, strategy, budget, seed):
    d = tables.get_table(table)
    xs, ys = _split_cut(cut)
    eve = [n for n in d.names if d.owner(n) == dc.EVE]
    alphabet = im.eve_alphabet(d, eve)
    report = {
        "table": table, "cut": cut,
        "entropy": {n: im.entropy(d, [n]).value for n in d.names},
        "cmi_identity": im.intrinsic_information_upper(
            d, xs, ys, eve, im.EveChannel.identity(alphabet)).to_json_obj(),
    }
    value, witness = im.intrinsic_information_search(d, xs, ys, eve, strategy=strategy,
                                                     budget=budget, seed=seed)
    report["intrinsic_upper"] = value.to_json_obj(witness)
    report["strategy"] = strategy
    return report


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _render_table(d, fmt):
    if fmt == "json":
        return dc.to_json(d, indent=1)
    if fmt == "csv":
        return dc.to_csv(d)
    return dc.to_text(d)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--search-budget", type=int, default=10_000)
    common.add_argument("--out", default=None, help="write output to this path")

    p = argparse.ArgumentParser(prog="boundinfo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("tables", parents=[common], help="print a reference table")
    t.add_argument("name", help=", ".join(sorted(tables.TABLES) + ["dprob"]))
    m = sub.add_parser("measures", parents=[common], help="entropic measures of a table")
    m.add_argument("--table", default="smolin")
    m.add_argument("--cut", default="AC:BD", help="honest bipartition, e.g. AC:BD")
    m.add_argument("--strategy", choices=("deterministic-exhaustive", "refined"),
                   default="deterministic-exhaustive")
    r = sub.add_parser("protocol", parents=[common], help="run a protocol with checks")
    r.add_argument("name", help=", ".join(PROTOCOLS))
    sub.add_parser("verify", parents=[common], help="run every acceptance criterion")
    e = sub.add_parser("export", parents=[common], help="export objects as JSON")
    e.add_argument("kind", choices=("table", "transcript", "state", "channel"))
    e.add_argument("name")
    return p


def _export(kind, name, args):
    if kind == "table":
        d = tables.get_table(name)
        return dc.to_csv(d) if args.format == "csv" else dc.to_json(d, indent=1)
    if kind == "transcript":
        _, transcript = run_protocol(name, args.tolerance)
        if transcript is None:
            raise UnknownProtocolError(f"protocol {name!r} has no classical transcript")
        return json.dumps(transcript, indent=1)
    if kind == "state":
        states = {
            "smolin": lambda: qc.smolin_state(),
            "smolin-purification": lambda: qc.smolin_purification(),
            "bell1": lambda: qc.bell_state(1, ("A", "B")),
            "ghz4": lambda: qc.ghz_state(["A", "B", "C", "D"]),
        }
        if name not in states:
            raise UnknownProtocolError(f"unknown state {name!r}; choose from {sorted(states)}")
        return json.dumps(states[name]().to_json_obj())
    d = tables.get_table(name)
    eve = [n for n in d.names if d.owner(n) == dc.EVE]
    honest = [n for n in d.names if d.owner(n) != dc.EVE]
    half = len(honest) // 2
    _, ch = im.intrinsic_information_search(d, honest[:half], honest[half:], eve,
                                            budget=args.search_budget, seed=args.seed)
    return ch.to_json(indent=1)


def main(argv=None):
    level = getattr(logging, os.environ.get("BOUNDINFO_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)
    args = build_parser().parse_args(argv)
    if args.tolerance <= 0 or args.search_budget <= 0:
        print("error: --tolerance and --search-budget must be positive", file=sys.stderr)
        return 2
    try:
        if args.command == "tables":
            _emit(_render_table(tables.get_table(args.name), args.format), args.out)
            return 0
        if args.command == "measures":
            rep = measures_report(args.table, args.cut, args.strategy, args.search_budget,
                                  args.seed)
            if args.format == "json":
                _emit(json.dumps(rep, indent=1), args.out)
            else:
                lines = [f"{k}: {v}" for k, v in rep.items()]
                _emit("\n".join(lines), args.out)
            return 0
        if args.command == "protocol":
            checks, transcript = run_protocol(args.name, args.tolerance)
            ok = all(c["pass"] for c in checks)
            if args.format == "json":
                _emit(json.dumps({"protocol": args.name, "checks": checks,
                                  "transcript": transcript, "pass": ok}, indent=1), args.out)
            else:
                lines = _check_lines(checks)
                _emit("\n".join(lines), args.out)
            return 0 if ok else 1
        if args.command == "verify":
            results = verify.run_all(tol=args.tolerance, seed=args.seed)
            ok = all(r.passed for r in results)
            if args.format == "json":
                _emit(json.dumps([r.to_json_obj() for r in results], indent=1), args.out)
            else:
                _emit("\n".join(r.line() for r in results)
                      + f"\n{sum(r.passed for r in results)}/{len(results)} criteria passed",
                      args.out)
            return 0 if ok else 1
        if args.command == "export":
            _emit(_export(args.kind, args.name, args), args.out)
            return 0
    except (BoundInfoError, ValueError) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
