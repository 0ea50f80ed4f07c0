import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from boundinfo import distribution as dc
from boundinfo import quantum as qc
from boundinfo import tables
from boundinfo.errors import BasisError, LabelError, NumericalRankError

S2 = 1 / np.sqrt(2)


def loop_partial_transpose(m, dims, which):
    """Partial transpose by explicit index loops over computational basis labels."""
    n = len(dims)
    out = np.zeros_like(m)
    basis = list(itertools.product(*(range(d) for d in dims)))
    index = {b: k for k, b in enumerate(basis)}
    for r, c in itertools.product(basis, basis):
        r2, c2 = list(r), list(c)
        for a in which:
            r2[a], c2[a] = c[a], r[a]
        out[index[tuple(r2)], index[tuple(c2)]] = m[index[r], index[c]]
    return out


def loop_partial_trace(m, dims, keep):
    basis = list(itertools.product(*(range(d) for d in dims)))
    index = {b: k for k, b in enumerate(basis)}
    kept = list(itertools.product(*(range(dims[a]) for a in keep)))
    out = np.zeros((len(kept), len(kept)), dtype=complex)
    for (i, ki), (j, kj) in itertools.product(enumerate(kept), enumerate(kept)):
        for b in basis:
            if tuple(b[a] for a in keep) != ki:
                continue
            b2 = list(b)
            for a, v in zip(keep, kj):
                b2[a] = v
            out[i, j] += m[index[b], index[tuple(b2)]]
    return out


def qubit(alpha, beta, label="M"):
    v = np.array([alpha, beta], dtype=complex)
    return qc.StateVector((label,), (2,), v / np.linalg.norm(v))


# -- Bell states ---------------------------------------------------------------------

def test_bell_states():
    assert np.allclose(qc.bell_state(1).amplitudes, [S2, 0, 0, S2])
    gram = np.array([[np.vdot(qc.bell_state(i).amplitudes, qc.bell_state(j).amplitudes)
                      for j in range(1, 5)] for i in range(1, 5)])
    assert np.allclose(gram, np.eye(4), atol=1e-12)
    singlet = qc.bell_state(4, ("a", "b"))
    assert np.allclose(singlet.reorder(("b", "a")).amplitudes, -singlet.amplitudes)
    with pytest.raises(IndexError):
        qc.bell_state(5)


# -- the Smolin state ------------------------------------------------------------------

def test_smolin_spectrum_and_entries():
    rho = qc.smolin_state()
    ev = np.sort(rho.eigenvalues())
    assert np.allclose(ev[-4:], 0.25, atol=1e-12) and np.allclose(ev[:-4], 0, atol=1e-12)
    entries = qc.rationalize_matrix(rho.matrix)
    assert entries is not None
    assert all(im == 0 and (re * 8).denominator == 1 for re, im in entries)


def test_smolin_permutation_invariance():
    rho = qc.smolin_state()
    for perm in itertools.permutations(rho.labels):
        moved = rho.relabel(dict(zip(rho.labels, perm))).reorder(rho.labels)
        assert qc.max_entry_distance(moved, rho) < 1e-12


def test_smolin_separable_decomposition_across_ab_cd():
    terms = []
    for i in range(1, 5):
        ab = qc.bell_state(i, ("A", "B")).density()
        cd = qc.bell_state(i, ("C", "D")).density()
        terms.append(qc.tensor(ab, cd).matrix)
    assert np.allclose(sum(terms) / 4, qc.smolin_state().matrix, atol=1e-12)


def test_partial_trace_of_smolin_is_maximally_mixed():
    rho = qc.smolin_state()
    ab = qc.partial_trace(rho, ["C", "D"])
    assert np.allclose(ab.matrix, np.eye(4) / 4, atol=1e-12)
    assert np.allclose(ab.matrix, loop_partial_trace(rho.matrix, rho.dims, [0, 1]), atol=1e-12)
    with pytest.raises(LabelError):
        qc.partial_trace(rho, ["Q"])


@pytest.mark.parametrize("cut", [["A"], ["B", "D"], ["A", "C", "D"]])
def test_partial_transpose_matches_loop_oracle_and_is_an_involution(cut):
    rng = np.random.default_rng(len(cut))
    m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    op = qc.DensityOperator(("A", "B", "C", "D"), (2, 2, 2, 2), m, check=False)
    pt = qc.partial_transpose(op, cut)
    which = [op.labels.index(c) for c in cut]
    assert np.array_equal(pt.matrix, loop_partial_transpose(m, op.dims, which))
    assert np.array_equal(qc.partial_transpose(pt, cut).matrix, m)


def test_bell_partial_transpose_eigenvalue():
    pt = qc.partial_transpose(qc.bell_state(1, ("A", "B")).density(), ["A"])
    assert pt.eigenvalues().min() == pytest.approx(-0.5, abs=1e-12)


def test_ppt_cuts():
    rho = qc.smolin_state()
    for cut in (["A", "B"], ["A", "C"], ["A", "D"]):
        rest = [n for n in rho.labels if n not in cut]
        assert qc.is_ppt(rho, cut) and qc.is_ppt(rho, rest)
    bell = qc.bell_state(1, ("A", "B")).density()
    assert not qc.is_ppt(bell, ["A"]) and not qc.is_ppt(bell, ["B"])
    with pytest.raises(LabelError):
        qc.is_ppt(rho, ["A", "B", "C", "D"])


def test_ppt_report_covers_every_cut():
    report = qc.ppt_report(qc.smolin_state())
    assert len(report) == 7
    for key in ("AB:CD", "AC:BD", "AD:BC"):
        assert report[key] >= -1e-9
    # single-party cuts are only reported
    assert {"A:BCD", "B:ACD", "C:ABD", "D:ABC"} <= set(report)


def test_density_operator_validation_and_json():
    with pytest.raises(ValueError):
        qc.DensityOperator(("A",), (2,), np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        qc.DensityOperator(("A",), (2,), np.eye(2))
    with pytest.raises(ValueError):
        qc.DensityOperator(("A",), (2,), np.diag([1.5, -0.5]))
    rho = qc.smolin_state()
    back = qc.state_from_json(json.loads(rho.to_json()))
    assert back.labels == rho.labels and np.allclose(back.matrix, rho.matrix)
    psi = qc.bell_state(3, ("x", "y"))
    back = qc.state_from_json(json.loads(json.dumps(psi.to_json_obj())))
    assert np.allclose(back.amplitudes, psi.amplitudes)


# -- purification and measurement -------------------------------------------------------

def test_purify_smolin():
    rho = qc.smolin_state()
    psi = qc.purify(rho)
    assert psi.labels[-1] == "Eve" and psi.dims[-1] == 4
    assert qc.max_entry_distance(qc.partial_trace(psi.density(), ["Eve"]), rho) < 1e-12


def test_purify_pure_state():
    psi = qc.bell_state(2, ("A", "B"))
    pur = qc.purify(psi.density())
    assert pur.dims == (2, 2, 1)
    assert abs(abs(np.vdot(pur.amplitudes, psi.amplitudes)) - 1) < 1e-12
    with pytest.raises(LabelError):
        qc.purify(psi.density(), ancilla="A")


def test_purify_rejects_ambiguous_rank():
    rho = qc.DensityOperator(("A",), (2,), np.diag([1 - 1e-11, 1e-11]))
    with pytest.raises(NumericalRankError):
        qc.purify(rho)


def test_measurement_reproduces_the_bound_information_table():
    basis = qc.MeasurementBasis.computational(["A", "B", "C", "D"]).merged(
        qc.MeasurementBasis({"Eve": qc.pair_eve_basis()}))
    d, exact = qc.measure(qc.smolin_purification(), basis)
    assert exact and set(d.table.values()) == {Fraction(1, 8)}
    assert d.owner("Eve") == dc.EVE and d.owner("A") == "A"
    assert dc.equal_up_to_relabel(d, tables.table_7(), "Eve") is not None


def test_measurement_of_canonical_purification():
    basis = qc.MeasurementBasis.computational(
        ["A", "B", "C", "D", "Eve"], [2, 2, 2, 2, 4], symbols={"Eve": ["e1", "e2", "e3", "e4"]})
    d, exact = qc.measure(qc.purify(qc.smolin_state()), basis)
    assert exact and dc.equal_up_to_relabel(d, tables.table_7(), "Eve") is not None


def test_measurement_marginal_matches_direct_born_rule():
    rho = qc.smolin_state()
    basis = qc.MeasurementBasis.computational(["A", "B", "C", "D"]).merged(
        qc.MeasurementBasis({"Eve": qc.pair_eve_basis()}))
    d, _ = qc.measure(qc.smolin_purification(), basis)
    direct, exact = qc.measure(rho, qc.MeasurementBasis.computational(rho.labels))
    assert exact
    assert dict(dc.marginalize(d, ["A", "B", "C", "D"]).table) == dict(direct.table)
    assert set(direct.table.values()) == {Fraction(1, 8)}


def test_measure_bell_gives_sbit_shape():
    d, exact = qc.measure(qc.bell_state(1, ("A", "B")), qc.MeasurementBasis.computational(["A", "B"]))
    assert exact and dict(d.table) == {("0", "0"): Fraction(1, 2), ("1", "1"): Fraction(1, 2)}
    assert dc.is_sbit(d, "A", "B")


def test_measure_irrational_probabilities_are_flagged():
    d, exact = qc.measure(qubit(1, 2 ** 0.25), qc.MeasurementBasis.computational(["M"]))
    assert not exact and sum(d.table.values()) == 1


def test_measurement_basis_errors():
    with pytest.raises(BasisError):
        qc.MeasurementBasis({"A": [("0", [1, 0]), ("1", [1, 1])]})
    with pytest.raises(BasisError):
        qc.measure(qc.bell_state(1, ("A", "B")), qc.MeasurementBasis.computational(["A"]))


# -- Bell measurement, unlocking and teleportation --------------------------------------------

def test_bell_measure_smolin():
    branches = qc.bell_measure(qc.smolin_state(), ("A", "B"))
    assert [i for i, _, _ in branches] == [1, 2, 3, 4]
    for i, post, p in branches:
        assert p == pytest.approx(0.25, abs=1e-12)
        assert qc.fidelity(post, qc.bell_state(i, ("C", "D"))) == pytest.approx(1, abs=1e-12)


def test_bell_measure_product_state():
    zero = qc.StateVector(("A", "B"), (2, 2), [1, 0, 0, 0])
    probs = {i: p for i, _, p in qc.bell_measure(zero.density(), ("A", "B"))}
    assert probs == pytest.approx({1: 0.5, 2: 0.5, 3: 0.0, 4: 0.0}, abs=1e-12)
    assert sum(probs.values()) == pytest.approx(1, abs=1e-12)
    with pytest.raises(LabelError):
        qc.bell_measure(zero.density(), ("A", "A"))


def test_quantum_unlock():
    worst, branches = qc.quantum_unlock()
    assert worst == pytest.approx(1, abs=1e-9) and len(branches) == 4
    worst, _ = qc.quantum_unlock(joiners=("A", "C"))
    assert worst == pytest.approx(1, abs=1e-9)
    _, raw = qc.quantum_unlock(correct=False)
    assert np.mean([f for _, _, f in raw]) == pytest.approx(0.25, abs=1e-12)
    assert sum(p * f for _, p, f in raw) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("alpha,beta", [(1, 0), (0, 1), (1, 1), (1, 1j), (0.6, 0.8j)])
def test_teleport_through_psi1_is_identity(alpha, beta):
    msg = qubit(alpha, beta)
    state = qc.tensor(msg, qc.bell_state(1, ("K1", "K2")))
    branches = qc.quantum_teleport(state, "M", ("K1", "K2"))
    assert len(branches) == 4
    for _, p, out in branches:
        assert p == pytest.approx(0.25, abs=1e-12)
        assert qc.fidelity(out, msg.relabel({"M": "K2"})) == pytest.approx(1, abs=1e-12)


def test_teleport_through_psi2_applies_z():
    msg = qubit(0.6, 0.8j)
    want = qc.StateVector(("K2",), (2,), qc.Z @ msg.amplitudes)
    state = qc.tensor(msg, qc.bell_state(2, ("K1", "K2")))
    for _, _, out in qc.quantum_teleport(state, "M", ("K1", "K2")):
        assert qc.fidelity(out, want) == pytest.approx(1, abs=1e-12)


def test_teleport_probabilities_for_mixed_key():
    mixed = qc.DensityOperator(("K1", "K2"), (2, 2), np.eye(4) / 4)
    state = qc.tensor(qubit(1, 1).density(), mixed)
    probs = [p for _, p, _ in qc.quantum_teleport(state, "M", ("K1", "K2"))]
    assert probs == pytest.approx([0.25] * 4, abs=1e-12)
    with pytest.raises(LabelError):
        qc.quantum_teleport(state, "K1", ("K1", "K2"))


# -- superactivation and GHZ extension ------------------------------------------------------------

@pytest.fixture(scope="module")
def superactivated():
    return qc.quantum_superactivation()


def test_quantum_superactivation(superactivated):
    assert superactivated.checkpoint_distance < 1e-9
    assert len(superactivated.checkpoints) == 16 and len(superactivated.branches) == 64
    assert all(abs(b[-1] - 1) <= 1e-9 for b in superactivated.branches)
    assert sum(b[1] for b in superactivated.branches) == pytest.approx(1, abs=1e-12)


def test_superactivation_key_is_secret_from_announcements(superactivated):
    d = qc.superactivation_key_distribution(superactivated)
    assert set(d.eve_view()) == {"bell_A", "bell_B", "bell_C"}
    assert dc.is_sbit(d, "D'", "E")


def test_ghz_kraus_completeness():
    k = qc.ghz_kraus()
    assert np.abs(k.completeness() - np.eye(4)).max() <= 1e-12
    with pytest.raises(ValueError):
        qc.KrausChannel((k.operators[0],))


def test_ghz_extension():
    res = qc.ghz_extend()
    assert len(res.branches) == 16
    assert all(abs(b[-1] - 1) <= 1e-9 for b in res.branches)
    assert res.exact and dict(res.distribution.table) == {
        o: Fraction(1, 16) for o in itertools.product("01", repeat=4)}
    assert all(res.distribution.owner(n) == dc.PUBLIC for n in res.distribution.names)


def test_ghz_extension_without_parity_correction_fails_on_odd_outcomes():
    # the sigma_x on the last party is doing real work on the odd-parity branches
    res = qc.ghz_extend()
    target = qc.ghz_state(["A", "B", "C", "D"])
    for outcome, _, state, _ in res.branches:
        if sum(outcome) % 2:
            undone = qc.apply_unitary(state, qc.X, "D")
            assert qc.fidelity(undone, target) < 1e-9
