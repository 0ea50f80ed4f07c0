import itertools
import json
from collections import defaultdict
from fractions import Fraction

import pytest

from boundinfo import distribution as dc
from boundinfo import measures as im
from boundinfo import protocols as lp
from boundinfo import tables
from boundinfo.errors import DisconnectedGraphError, OwnershipError, ShapeError

HALF = Fraction(1, 2)


@pytest.fixture(scope="module")
def pair_run():
    return lp.superactivate_pair()


@pytest.fixture(scope="module")
def five():
    return lp.symmetrized_five()


# -- tables ------------------------------------------------------------------------

def test_smolin_table_matches_fixture():
    d = lp.smolin_table()
    assert d.names == ("A", "C", "B", "D", "Eve")
    assert d.prob(A=0, C=0, B=1, D=1, Eve="e2") == Fraction(1, 8)
    assert set(d.table.values()) == {Fraction(1, 8)}
    assert d == tables.table_7()


def test_smolin_honest_marginal_is_even_parity():
    d = dc.marginalize(lp.smolin_table(), ["A", "B", "C", "D"])
    even = {s for s in itertools.product("01", repeat=4) if sum(map(int, s)) % 2 == 0}
    assert dict(d.table) == {s: Fraction(1, 8) for s in even}


def test_compact_tables():
    c1, c2 = lp.compact_table(1), lp.compact_table(2)
    assert c1 == tables.table_20()
    assert c2 == tables.table_21()
    for j in "01":
        k = lp.flip(j)
        assert c2.prob(A2=j, B2=k, C2=j, E=k, Eve2="f3") == Fraction(1, 8)
    renaming = {"A1": "A", "C1": "C", "B1": "B", "Eve1": "Eve"}
    assert dc.permute_check(c1, lp.smolin_table(), renaming)
    assert dc.permute_check(lp.smolin_table(), lp.smolin_table(),
                            {"A": "B", "B": "A", "C": "D", "D": "C"})
    with pytest.raises(ValueError):
        lp.compact_table(3)


# -- classical teleportation ---------------------------------------------------------

def test_teleport_a2_gives_table_11():
    d = dc.product(lp.compact_table(1), lp.compact_table(2))
    out, t = lp.classical_teleport(d, "A", "A2", "A1", "C", "C1", "C1'")
    assert dc.tables_equal(dc.drop_public(out), tables.table_11())
    before = t.snapshots["teleport:C1':before-discard"]
    assert all(r["C1'"] == lp.xor(r["C1"], r["A1"], r["A2"]) for r, _ in before.as_dicts())
    assert t.announced() == ["A2^A1"] and out.owner("A2^A1") == dc.PUBLIC


def _keyed_message(key_owner_r="R"):
    return dc.product_all([
        dc.uniform([dc.bit("m", "S")], [("0",), ("1",)]),
        dc.make_distribution([dc.bit("k", "S"), dc.bit("k'", key_owner_r)],
                             [(("0", "0"), HALF), (("1", "1"), HALF)]),
    ])


def test_teleport_over_sbit_key_is_secret():
    d = dc.apply_local_function(_keyed_message(), "S", ["m"], lambda x: x, "m_copy")
    out, _ = lp.classical_teleport(d, "S", "m", "k", "R", "k'", "m_R")
    assert dc.is_sbit(out, "m_copy", "m_R")
    v = im.mutual_information(out, ["m_copy"], list(out.eve_view()))
    assert v.value == 0.0 and v.exact
    pair = dc.marginalize(out, ["m_copy", "m_R"])
    assert dict(pair.table) == {("0", "0"): HALF, ("1", "1"): HALF}


def test_teleport_with_public_key_leaks():
    d = dc.apply_local_function(_keyed_message(), "S", ["m"], lambda x: x, "m_copy")
    d = dc.announce(d, "k'")
    out, _ = lp.classical_teleport(d, "S", "m", "k", "R", "k'", "m_R")
    assert not dc.is_sbit(out, "m_copy", "m_R")
    v = im.mutual_information(out, ["m_copy"], list(out.eve_view()))
    assert v.value == pytest.approx(1.0, abs=1e-12)


def test_teleport_ownership_checked():
    with pytest.raises(OwnershipError):
        lp.classical_teleport(_keyed_message(), "R", "m", "k", "R", "k'", "m_R")


# -- unlocking ----------------------------------------------------------------------

def test_unlock_b_d_gives_table_8():
    (eq, ne), t = lp.unlock(tables.table_7(), ("B", "D"), ("A", "C"))
    assert eq.acceptance == HALF and ne.acceptance == HALF
    assert dc.tables_equal(dc.drop_public(eq.dist), tables.table_8())
    assert eq.sbit and ne.sbit
    assert t.validate() and t.announced() == ["B=D"]


@pytest.mark.parametrize("joiners,targets", [
    (("B", "D"), ("A", "C")), (("A", "C"), ("B", "D")),
    (("A", "B"), ("C", "D")), (("C", "D"), ("A", "B")),
    (("A", "D"), ("B", "C")), (("B", "C"), ("A", "D")),
])
def test_unlock_every_joiner_pair(joiners, targets):
    branches, _ = lp.unlock(tables.table_7(), joiners, targets)
    assert [b.label for b in branches] == ["equal", "unequal"]
    assert all(b.sbit for b in branches)
    assert sum(b.acceptance for b in branches) == 1


def test_unlock_without_flip_fails_on_unequal_branch():
    # the unequal branch only works because of the correction: A and C are anti-correlated
    diff, _ = dc.post_select(tables.table_7(), lambda r: r["B"] != r["D"])
    assert all(r["A"] != r["C"] for r, _ in diff.as_dicts())
    assert not dc.is_sbit(diff, "A", "C")


def test_unlock_shape_errors():
    with pytest.raises(ShapeError):
        lp.unlock(tables.table_7(), ("B", "D"), ("B", "C"))
    with pytest.raises(ShapeError):
        lp.unlock(tables.table_10(), ("B1", "D"), ("A1", "C1"))


def test_unlock_on_the_superactivation_intermediate():
    # Clare's equality announcement on the two-copy intermediate is exactly an unlocking
    branches, _ = lp.unlock(tables.table_22(), ("C1'", "C2"), ("D'", "E"))
    assert all(b.sbit for b in branches)
    assert branches[1].dist.owner("D'") == "D"


# -- two-copy superactivation --------------------------------------------------------

def test_superactivation_checkpoints(pair_run):
    final, t = pair_run
    s = t.snapshots
    assert dc.tables_equal(s["table-10"], tables.table_10())
    assert dc.tables_equal(dc.drop_public(s["table-11"]), tables.table_11())
    s12 = dc.drop_public(s["table-12"])
    assert dc.tables_equal(s12, tables.table_22())
    assert t.validate()


def test_compact_block_table_matches_up_to_eve_relabel(pair_run):
    _, t = pair_run
    s12 = dc.merge_registers(dc.drop_public(t.snapshots["table-12"]), ["Eve1", "Eve2"], "Eve12")
    compact = dc.merge_registers(tables.table_12(), ["Eve1", "Eve2"], "Eve12")
    mapping = dc.equal_up_to_relabel(s12, compact, "Eve12")
    assert mapping is not None
    # the relabeling only ever touches Eve2's symbol
    assert all(k.split(",")[0] == v.split(",")[0] for k, v in mapping.items())


def test_superactivation_final_sbit(pair_run):
    final, t = pair_run
    assert dc.is_sbit(final, "D'", "E")
    assert {"Eve1", "Eve2"} | set(t.announced()) <= set(final.eve_view())
    assert "C1'=C2" in t.announced()


def test_intermediate_is_bound_information_with_composite_eve(pair_run):
    _, t = pair_run
    d = dc.merge_registers(dc.drop_public(t.snapshots["table-12"]), ["Eve1", "Eve2"], "Eve12")
    d = dc.rename(d, {"C1'": "A", "D'": "B", "C2": "C", "E": "D"})
    smolin = lp.smolin_table()

    def conditionals(dist, eve):
        out = defaultdict(dict)
        for r, p in dist.as_dicts():
            out[r[eve]][tuple(r[n] for n in "ABCD")] = p
        return {e: frozenset((k, v / sum(rows.values())) for k, v in rows.items())
                for e, rows in out.items()}

    reference = set(conditionals(smolin, "Eve").values())
    ours = conditionals(d, "Eve12")
    assert len(ours) == 16 and set(ours.values()) == reference


# -- five copies ----------------------------------------------------------------------

def test_symmetrized_five_shape(five):
    assert len(five) == 32768
    assert set(five.table.values()) == {Fraction(1, 32768)}
    assert set(five.eve_view()) == {f"Eve{k}" for k in range(1, 6)}
    layout = lp.five_copy_layout()
    for k, parties in layout.items():
        names = [f"{p}{k}" for p in parties] + [f"Eve{k}"]
        copy = dc.marginalize(five, names)
        assert len(copy) == 8 and set(copy.table.values()) == {Fraction(1, 8)}
        # every copy is the bound-information table under a register renaming
        rename = dict(zip([f"{p}{k}" for p in parties] + [f"Eve{k}"], ["A", "B", "C", "D", "Eve"]))
        assert dc.tables_equal(dc.rename(copy, rename), lp.smolin_table())


def test_five_copy_de_uses_expected_copies(five):
    d, ok, t = lp.distill_pair_from_five(five, ("D", "E"))
    assert ok
    assert str(("A", "B", "C", "D")) in t.steps[0].op
    assert str(("A", "B", "C", "E")) in t.steps[0].op


@pytest.mark.parametrize("pair", list(itertools.combinations(lp.FIVE_PARTIES, 2)))
def test_five_copy_every_pair(five, pair):
    d, ok, t = lp.distill_pair_from_five(five, pair)
    assert ok
    assert {f"Eve{k}" for k in range(1, 6)} | set(t.announced()) <= set(d.eve_view())


def test_five_copy_rejects_bad_targets(five):
    with pytest.raises(ShapeError):
        lp.distill_pair_from_five(five, ("A", "A"))
    with pytest.raises(ShapeError):
        lp.distill_pair_from_five(tables.table_7(), ("A", "B"))


# -- distributing a secret ---------------------------------------------------------------

@pytest.fixture(scope="module")
def secret_run():
    return lp.distribute_secret()


def test_secret_checkpoints(secret_run):
    final, t = secret_run
    for s in (0, 1):
        assert dc.tables_equal(lp.secret_view(t.snapshots["table-17"], s=s), tables.table_17(s))
        assert dc.tables_equal(lp.secret_view(final, s=s, stage="table-18"), tables.table_18(s))
    assert t.validate()


def test_david_learns_s(secret_run):
    final, _ = secret_run
    for r, _ in final.as_dicts():
        assert r["s_D"] == r["s_A"]
    assert dc.is_multipartite_sbit(final, ["s_A", "s_B", "s_C", "s_D"])


def test_eve_learns_nothing_about_s(secret_run):
    final, _ = secret_run
    view = list(final.eve_view())
    assert set(view) == {"Eve", "A+s", "B+s", "C+s"}
    v = im.conditional_mutual_information(final, ["s_A"], view)
    assert v.value == 0.0 and v.exact
    by_view = defaultdict(lambda: defaultdict(Fraction))
    for r, p in final.as_dicts():
        by_view[tuple(r[n] for n in view)][r["s_A"]] += p
    assert all(c["0"] == c["1"] for c in by_view.values())


def test_announced_parity_pattern_distribution(secret_run):
    final, _ = secret_run
    # brute force over the 16 joint (row, s) outcomes
    expected = defaultdict(Fraction)
    for r, p in lp.smolin_table().as_dicts():
        for s in "01":
            expected[tuple(lp.xor(s, r[k]) for k in "ABC")] += p * HALF
    got = dc.marginalize(final, ["A+s", "B+s", "C+s"])
    assert dict(got.table) == dict(expected)
    assert len(expected) == 8 and set(expected.values()) == {Fraction(1, 8)}


# -- multipartite keys from pairwise keys -------------------------------------------------

def test_star_over_five():
    pairs = [lp.pairwise_sbit(f"A_{p}", f"{p}_A", ("A", p)) for p in "BCDE"]
    d = lp.multipartite_from_pairwise(pairs, root="A")
    keys = [f"key_{p}" for p in "ABCDE"]
    assert dc.is_multipartite_sbit(d, keys)


def test_chain_of_three():
    pairs = [lp.pairwise_sbit("A_B", "B_A", ("A", "B")), lp.pairwise_sbit("B_C", "C_B", ("B", "C"))]
    d = lp.multipartite_from_pairwise(pairs)
    assert dc.is_multipartite_sbit(d, ["key_A", "key_B", "key_C"])


def test_single_pair():
    d = lp.multipartite_from_pairwise([lp.pairwise_sbit("x", "y", ("A", "B"))])
    assert dc.is_sbit(d, "key_A", "key_B")


def test_disconnected_graph():
    pairs = [lp.pairwise_sbit("a", "b", ("A", "B")), lp.pairwise_sbit("c", "d", ("C", "D"))]
    with pytest.raises(DisconnectedGraphError):
        lp.multipartite_from_pairwise(pairs)


# -- transcripts ---------------------------------------------------------------------------

def test_transcript_export(pair_run):
    _, t = pair_run
    obj = json.loads(t.to_json())
    assert {"actor", "op", "announced", "snapshot"} == set(obj["steps"][0])
    assert {"table-10", "table-11", "table-12", "final"} <= set(obj["snapshots"])
    back = dc.from_json_obj(obj["snapshots"]["table-11"])
    assert back == t.snapshots["table-11"]


def test_transcript_validate_catches_unpublished_announcement():
    t = lp.ProtocolTranscript()
    t.record("A", "claims to announce A", ["A"])
    t.checkpoint("after", tables.table_7())
    assert not t.validate()
