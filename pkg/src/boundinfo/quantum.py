"""Dense few-qubit states and channels with explicit subsystem labels.

Operators are plain numpy matrices; every object carries its subsystem
labels and dimensions, and tensor products follow label order, never an
implicit positional convention.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .distribution import EVE, PUBLIC, JointDistribution, RegisterSpec
from .errors import BasisError, LabelError, NumericalRankError

ATOL = 1e-12
CHECK_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

_S = 1 / np.sqrt(2)
_BELL = {
    1: np.array([1, 0, 0, 1], dtype=complex) * _S,
    2: np.array([1, 0, 0, -1], dtype=complex) * _S,
    3: np.array([0, 1, 1, 0], dtype=complex) * _S,
    4: np.array([0, 1, -1, 0], dtype=complex) * _S,
}

# psi2 = (Z x I) psi1, psi3 = (X x I) psi1, psi4 = (XZ x I) psi1. Applying the
# inverse on the first qubit of a pair in psi_k returns it to psi1; the same
# table undoes the Pauli frame left by a teleportation outcome k.
CORRECTION = {1: I2, 2: Z, 3: X, 4: Z @ X}


class _Labeled:
    labels: tuple
    dims: tuple

    def _axes(self, names):
        try:
            return [self.labels.index(n) for n in names]
        except ValueError:
            missing = [n for n in names if n not in self.labels]
            raise LabelError(f"unknown subsystems {missing}; have {list(self.labels)}") from None

    @property
    def dim(self):
        return int(np.prod(self.dims)) if self.dims else 1

    def dim_of(self, names):
        return int(np.prod([self.dims[i] for i in self._axes(names)])) if names else 1


@dataclass(frozen=True, eq=False)
class StateVector(_Labeled):
    labels: tuple
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amp)
        if len(set(self.labels)) != len(self.labels) or len(self.labels) != len(self.dims):
            raise LabelError(f"bad labels {self.labels} for dims {self.dims}")
        if amp.size != self.dim:
            raise ValueError(f"{amp.size} amplitudes for dimension {self.dim}")
        if abs(np.vdot(amp, amp).real - 1) > ATOL:
            raise ValueError("state vector is not normalized")

    def density(self) -> "DensityOperator":
        return DensityOperator(self.labels, self.dims, np.outer(self.amplitudes,
                                                                self.amplitudes.conj()))

    def reorder(self, order) -> "StateVector":
        axes = self._axes(order)
        t = self.amplitudes.reshape(self.dims).transpose(axes)
        return StateVector(tuple(order), tuple(self.dims[a] for a in axes), t.reshape(-1))

    def relabel(self, mapping) -> "StateVector":
        return StateVector(tuple(mapping.get(n, n) for n in self.labels), self.dims,
                           self.amplitudes)

    def to_json_obj(self):
        return {"labels": [{"name": n, "dim": d} for n, d in zip(self.labels, self.dims)],
                "re": self.amplitudes.real.tolist(), "im": self.amplitudes.imag.tolist()}


@dataclass(frozen=True, eq=False)
class DensityOperator(_Labeled):
    """Square operator on labelled subsystems.

    With ``check=True`` (default) the matrix must be a valid state:
    Hermitian and unit trace within 1e-12, eigenvalues above -1e-9.
    """

    labels: tuple
    dims: tuple
    matrix: np.ndarray
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if len(set(self.labels)) != len(self.labels) or len(self.labels) != len(self.dims):
            raise LabelError(f"bad labels {self.labels} for dims {self.dims}")
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {m.shape} does not match dimension {self.dim}")
        if self.check:
            if not np.allclose(m, m.conj().T, atol=ATOL):
                raise ValueError("density operator is not Hermitian")
            if abs(np.trace(m).real - 1) > ATOL:
                raise ValueError(f"density operator has trace {np.trace(m).real}")
            if np.linalg.eigvalsh(m).min() < -CHECK_TOL:
                raise ValueError("density operator is not positive semidefinite")

    def tensor_(self):
        return self.matrix.reshape(self.dims + self.dims)

    def reorder(self, order) -> "DensityOperator":
        axes = self._axes(order)
        n = len(self.labels)
        t = self.tensor_().transpose(axes + [a + n for a in axes])
        dims = tuple(self.dims[a] for a in axes)
        return DensityOperator(tuple(order), dims, t.reshape(self.dim, self.dim), self.check)

    def relabel(self, mapping) -> "DensityOperator":
        return DensityOperator(tuple(mapping.get(n, n) for n in self.labels), self.dims,
                               self.matrix, self.check)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def to_json_obj(self):
        return {"labels": [{"name": n, "dim": d} for n, d in zip(self.labels, self.dims)],
                "re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_obj(), **kwargs)


def state_from_json(obj) -> StateVector | DensityOperator:
    labels = [x["name"] for x in obj["labels"]]
    dims = [x["dim"] for x in obj["labels"]]
    data = np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])
    if data.ndim == 1:
        return StateVector(labels, dims, data)
    return DensityOperator(labels, dims, data)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Kraus instrument; operators may map ``in_dim`` to a different ``out_dim``."""

    operators: tuple
    outcomes: tuple = ()

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        object.__setattr__(self, "operators", ops)
        if not self.outcomes:
            object.__setattr__(self, "outcomes", tuple(range(len(ops))))
        if len({k.shape for k in ops}) != 1:
            raise ValueError("Kraus operators must share one shape")
        if not np.allclose(self.completeness(), np.eye(ops[0].shape[1]), atol=ATOL):
            raise ValueError("Kraus operators do not satisfy sum K^dag K = I")

    def completeness(self):
        return sum(k.conj().T @ k for k in self.operators)


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Per-subsystem orthonormal bases: label -> [(symbol, vector), ...]."""

    bases: Mapping

    def __post_init__(self):
        clean = {}
        for label, vecs in self.bases.items():
            syms = tuple(str(s) for s, _ in vecs)
            mat = np.array([np.asarray(v, dtype=complex) for _, v in vecs])
            if not np.allclose(mat.conj() @ mat.T, np.eye(len(vecs)), atol=ATOL):
                raise BasisError(f"basis for {label!r} is not orthonormal")
            clean[label] = (syms, mat)
        object.__setattr__(self, "bases", clean)

    @classmethod
    def computational(cls, labels, dims=None, symbols=None):
        dims = dims or [2] * len(labels)
        out = {}
        for label, d in zip(labels, dims):
            syms = symbols[label] if symbols and label in symbols else [str(k) for k in range(d)]
            out[label] = [(s, np.eye(d)[k]) for k, s in enumerate(syms)]
        return cls(out)

    def merged(self, other: "MeasurementBasis") -> "MeasurementBasis":
        raw = {k: list(zip(s, m)) for k, (s, m) in self.bases.items()}
        raw.update({k: list(zip(s, m)) for k, (s, m) in other.bases.items()})
        return MeasurementBasis(raw)


# -- constructors -------------------------------------------------------------

def bell_state(i: int, labels=("q0", "q1")) -> StateVector:
    """Bell vector psi_i, i in 1..4: (00+11), (00-11), (01+10), (01-10) over sqrt 2."""
    if i not in _BELL:
        raise IndexError(f"Bell index {i} not in 1..4")
    return StateVector(labels, (2, 2), _BELL[i])


def ghz_state(labels: Sequence[str]) -> StateVector:
    n = len(labels)
    amp = np.zeros(2**n, dtype=complex)
    amp[0] = amp[-1] = _S
    return StateVector(labels, (2,) * n, amp)


def plus_state(label: str) -> StateVector:
    return StateVector((label,), (2,), np.array([_S, _S]))


def tensor(*parts):
    """Tensor product in argument order; all states or all density operators."""
    labels = tuple(itertools.chain.from_iterable(p.labels for p in parts))
    dims = tuple(itertools.chain.from_iterable(p.dims for p in parts))
    if all(isinstance(p, StateVector) for p in parts):
        amp = parts[0].amplitudes
        for p in parts[1:]:
            amp = np.kron(amp, p.amplitudes)
        return StateVector(labels, dims, amp)
    mats = [p.matrix if isinstance(p, DensityOperator) else p.density().matrix for p in parts]
    m = mats[0]
    for x in mats[1:]:
        m = np.kron(m, x)
    return DensityOperator(labels, dims, m)


def smolin_state(labels=("A", "B", "C", "D")) -> DensityOperator:
    """(1/4) sum_i psi_i(AB) x psi_i(CD), projectors."""
    a, b, c, d = labels
    terms = [tensor(bell_state(i, (a, b)), bell_state(i, (c, d))).density().matrix
             for i in range(1, 5)]
    return DensityOperator(labels, (2, 2, 2, 2), sum(terms) / 4)


# -- multilinear algebra --------------------------------------------------------

def partial_trace(rho: DensityOperator, subsystems: Sequence[str]) -> DensityOperator:
    """Trace out ``subsystems``."""
    subsystems = list(subsystems)
    rho._axes(subsystems)
    keep = [n for n in rho.labels if n not in subsystems]
    r = rho.reorder(keep + subsystems)
    dk, dt = r.dim_of(keep), r.dim_of(subsystems)
    m = np.einsum("ajbj->ab", r.matrix.reshape(dk, dt, dk, dt))
    return DensityOperator(keep, r.dims[:len(keep)], m, rho.check)


def partial_transpose(rho: DensityOperator, subsystems: Sequence[str]) -> DensityOperator:
    """Transpose the indices of ``subsystems``; result is unchecked."""
    axes = rho._axes(list(subsystems))
    n = len(rho.labels)
    perm = list(range(2 * n))
    for a in axes:
        perm[a], perm[a + n] = a + n, a
    m = rho.tensor_().transpose(perm).reshape(rho.dim, rho.dim)
    return DensityOperator(rho.labels, rho.dims, m, check=False)


def is_ppt(rho: DensityOperator, cut: Sequence[str], tol: float = CHECK_TOL) -> bool:
    """Positive partial transpose across ``cut`` versus the rest."""
    cut = list(cut)
    rho._axes(cut)
    if not cut or len(cut) == len(rho.labels):
        raise LabelError("cut must be a proper non-empty subset of the subsystems")
    return bool(np.linalg.eigvalsh(partial_transpose(rho, cut).matrix).min() >= -tol)


def apply_operator(state, op, targets: Sequence[str], out_labels: Sequence[str] = None,
                   out_dims: Sequence[int] = None):
    """Apply ``op`` (in_dim -> out_dim) to ``targets``; outputs go first.

    Returns an unnormalized, unchecked result; ``out_labels=()`` removes the
    targets (useful for projecting onto a bra).
    """
    targets = list(targets)
    out_labels = list(targets if out_labels is None else out_labels)
    op = np.asarray(op, dtype=complex)
    if out_dims is None:
        out_dims = [state.dims[i] for i in state._axes(targets)] if out_labels == targets \
            else ([2] * len(out_labels))
    rest = [n for n in state.labels if n not in targets]
    r = state.reorder(targets + rest)
    drest = r.dim_of(rest)
    big = np.kron(op, np.eye(drest))
    dims = list(out_dims) + [r.dims[i] for i in range(len(targets), len(r.labels))]
    labels = out_labels + rest
    if isinstance(state, StateVector):
        return _RawVector(labels, dims, big @ r.amplitudes)
    return DensityOperator(labels, dims, big @ r.matrix @ big.conj().T, check=False)


@dataclass(frozen=True, eq=False)
class _RawVector(_Labeled):
    labels: tuple
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dims", tuple(self.dims))


def normalized(rho: DensityOperator):
    """``(probability, normalized checked state)`` for an unnormalized branch."""
    p = float(np.trace(rho.matrix).real)
    if p <= ATOL:
        return p, None
    return p, DensityOperator(rho.labels, rho.dims, rho.matrix / p)


def fidelity(rho: DensityOperator, psi: StateVector) -> float:
    """<psi| rho |psi> after aligning labels."""
    psi = psi.reorder(rho.labels)
    return float(np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes).real)


def max_entry_distance(a: DensityOperator, b: DensityOperator) -> float:
    b = b.reorder(a.labels)
    return float(np.abs(a.matrix - b.matrix).max())


def rationalize_matrix(m, max_den=2**12, tol=ATOL):
    """Entrywise nearest dyadic-friendly rationals, or None if any entry is off."""
    out = []
    for z in np.asarray(m).ravel():
        parts = []
        for x in (z.real, z.imag):
            q = Fraction(float(x)).limit_denominator(max_den)
            if abs(float(q) - x) > tol:
                return None
            parts.append(q)
        out.append(tuple(parts))
    return out


# -- purification and measurement ----------------------------------------------

def _canonical_eigenbasis(vecs, tol=1e-6):
    """Deterministic orthonormal basis of span(vecs): pivot on basis vectors in index order."""
    proj = vecs @ vecs.conj().T
    chosen = []
    for j in range(proj.shape[0]):
        v = proj[:, j].copy()
        for c in chosen:
            v -= np.vdot(c, v) * c
        nrm = np.linalg.norm(v)
        if nrm > tol:
            v = v / nrm
            k = int(np.flatnonzero(np.abs(v) > tol)[0])
            v = v * (abs(v[k]) / v[k])
            chosen.append(v)
        if len(chosen) == vecs.shape[1]:
            break
    return chosen


def purify(rho: DensityOperator, decomposition=None, ancilla: str = "Eve") -> StateVector:
    """Purification sum_k sqrt(w_k) |v_k> |k>_ancilla, ancilla dimension = rank.

    Without ``decomposition`` the eigendecomposition is used, and each
    degenerate eigenspace gets a canonical basis (pivoted on computational
    basis vectors) so the result does not depend on the eigensolver.
    ``decomposition`` may supply ``[(weight, StateVector), ...]`` with
    orthonormal vectors; it must reproduce ``rho``.
    """
    if ancilla in rho.labels:
        raise LabelError(f"ancilla label {ancilla!r} already in use")
    if decomposition is None:
        vals, vecs = np.linalg.eigh(rho.matrix)
        ambiguous = (vals > 1e-13) & (vals < CHECK_TOL)
        if ambiguous.any():
            raise NumericalRankError(f"eigenvalues {vals[ambiguous]} are neither zero nor positive")
        order = np.argsort(-vals)
        vals, vecs = vals[order], vecs[:, order]
        keep = vals >= CHECK_TOL
        vals, vecs = vals[keep], vecs[:, keep]
        weights, vectors = [], []
        k = 0
        while k < len(vals):
            g = k
            while g < len(vals) and abs(vals[g] - vals[k]) < CHECK_TOL:
                g += 1
            for v in _canonical_eigenbasis(vecs[:, k:g]):
                weights.append(float(np.mean(vals[k:g])))
                vectors.append(v)
            k = g
    else:
        weights = [float(w) for w, _ in decomposition]
        vectors = [v.reorder(rho.labels).amplitudes for _, v in decomposition]
    rank = len(vectors)
    amp = sum(np.sqrt(w) * np.kron(v, np.eye(rank)[k])
              for k, (w, v) in enumerate(zip(weights, vectors)))
    psi = StateVector(rho.labels + (ancilla,), rho.dims + (rank,), amp)
    back = partial_trace(psi.density(), [ancilla])
    if np.abs(back.matrix - rho.matrix).max() > ATOL:
        raise NumericalRankError("purification does not reproduce the state")
    return psi


def smolin_decomposition(labels=("A", "B", "C", "D")):
    a, b, c, d = labels
    return [(0.25, tensor(bell_state(i, (a, b)), bell_state(i, (c, d)))) for i in range(1, 5)]


def smolin_purification(labels=("A", "B", "C", "D"), ancilla="Eve") -> StateVector:
    """Purification whose ancilla |k> records the Bell pair psi_k x psi_k."""
    return purify(smolin_state(labels), smolin_decomposition(labels), ancilla)


def pair_eve_basis(symbols=("e1", "e2", "e3", "e4")):
    """Eve basis (|1>+-|2>)/sqrt2, (|3>+-|4>)/sqrt2 on a four-level ancilla."""
    e = np.eye(4)
    vecs = [(e[0] + e[1]) * _S, (e[0] - e[1]) * _S, (e[2] + e[3]) * _S, (e[2] - e[3]) * _S]
    return list(zip(symbols, vecs))


def measure(state, bases: MeasurementBasis, owners: Mapping[str, str] | None = None,
            max_den: int = 2**16):
    """Born-rule outcome distribution of a full measurement.

    Returns ``(JointDistribution, exact)``. Probabilities are snapped to
    the nearest rational with denominator at most ``max_den``; ``exact`` is
    False if any probability moved by more than 1e-12. Registers are
    owned by their label, except ``Eve*`` labels, owned by Eve.
    """
    if isinstance(state, StateVector):
        rho = state.density()
    else:
        rho = state
    missing = [n for n in rho.labels if n not in bases.bases]
    if missing:
        raise BasisError(f"no basis for subsystems {missing}")
    for n, d in zip(rho.labels, rho.dims):
        if bases.bases[n][1].shape != (d, d):
            raise BasisError(f"basis for {n!r} has wrong dimension")
    u = np.array([[1]], dtype=complex)
    for n in rho.labels:
        u = np.kron(u, bases.bases[n][1].conj())
    probs = np.einsum("ij,jk,ik->i", u, rho.matrix, u.conj()).real
    symbols = list(itertools.product(*(bases.bases[n][0] for n in rho.labels)))
    owners = dict(owners or {})
    regs = []
    for n in rho.labels:
        owner = owners.get(n, EVE if n.startswith("Eve") else n)
        regs.append(RegisterSpec(n, bases.bases[n][0], owner))
    table, exact = {}, True
    for sym, p in zip(symbols, probs):
        q = Fraction(float(max(p, 0.0))).limit_denominator(max_den)
        if abs(float(q) - p) > ATOL:
            exact = False
        if q:
            table[sym] = q
    total = sum(table.values(), Fraction(0))
    if total != 1:
        exact = False
        table = {k: v / total for k, v in table.items()}
    return JointDistribution(regs, table), exact


# -- Bell measurement, teleportation, unlocking --------------------------------

def bell_measure(rho: DensityOperator, pair: Sequence[str]):
    """Projective Bell measurement on ``pair``.

    Returns ``[(i, post_state_on_rest, probability), ...]`` for i in 1..4;
    ``post_state`` is None for zero-probability outcomes.
    """
    pair = list(pair)
    rho._axes(pair)
    if len(pair) != 2 or pair[0] == pair[1]:
        raise LabelError("Bell measurement needs two distinct qubits")
    out = []
    for i in range(1, 5):
        branch = apply_operator(rho, _BELL[i].conj()[None, :], pair, out_labels=(), out_dims=())
        p, post = normalized(branch)
        out.append((i, post, p))
    return out


def apply_unitary(rho: DensityOperator, u, label: str) -> DensityOperator:
    r = apply_operator(rho, u, [label])
    return DensityOperator(r.labels, r.dims, r.matrix).reorder(rho.labels)


def quantum_unlock(joiners=("A", "B"), correct: bool = True):
    """Joiners Bell-measure their Smolin qubits; the others correct to psi1.

    Returns ``(worst fidelity, [(outcome, probability, fidelity), ...])``.
    """
    rho = smolin_state()
    targets = [n for n in rho.labels if n not in joiners]
    branches = []
    for i, post, p in bell_measure(rho, joiners):
        if post is None:
            continue
        if correct:
            post = apply_unitary(post, CORRECTION[i], targets[0])
        branches.append((i, p, fidelity(post, bell_state(1, targets))))
    return min(f for _, _, f in branches), branches


def quantum_teleport(state, msg: str, pair: Sequence[str]):
    """Teleport ``msg`` over ``pair`` = (sender half, receiver half).

    Bell measurement on (msg, sender half), then the receiver applies the
    psi1-frame correction. Returns ``[(outcome, probability, state), ...]``
    with the measured qubits removed.
    """
    rho = state.density() if isinstance(state, StateVector) else state
    first, second = pair
    if msg in pair:
        raise LabelError("message qubit must not be part of the key pair")
    branches = []
    for i, post, p in bell_measure(rho, [msg, first]):
        if post is None:
            continue
        branches.append((i, p, apply_unitary(post, CORRECTION[i], second)))
    return branches


@dataclass
class SuperactivationResult:
    checkpoints: list
    branches: list

    @property
    def fidelity(self) -> float:
        return min(b[-1] for b in self.branches)

    @property
    def checkpoint_distance(self) -> float:
        target = smolin_state(("C1'", "D'", "C2", "E"))
        return max(max_entry_distance(s, target) for _, _, s in self.checkpoints)


def quantum_superactivation() -> SuperactivationResult:
    """Two Smolin copies; David and Elena end with psi1 in every branch.

    Copy 1 sits on (A1, C1, B1, D) and copy 2 on (A2, B2, C2, E), each in
    the A B C D slot order of :func:`smolin_state`. Alice teleports A2 over
    (A1, C1), Bob teleports B2 over (B1, D), Clare Bell-measures her two
    qubits and David corrects.
    """
    rho = tensor(smolin_state(("A1", "C1", "B1", "D")), smolin_state(("A2", "B2", "C2", "E")))
    checkpoints, branches = [], []
    for a, pa, s1 in quantum_teleport(rho, "A2", ("A1", "C1")):
        s1 = s1.relabel({"C1": "C1'"})
        for b, pb, s2 in quantum_teleport(s1, "B2", ("B1", "D")):
            s2 = s2.relabel({"D": "D'"}).reorder(("C1'", "C2", "D'", "E"))
            checkpoints.append(((a, b), pa * pb, s2))
            for c, post, pc in bell_measure(s2, ("C1'", "C2")):
                if post is None:
                    continue
                post = apply_unitary(post, CORRECTION[c], "D'")
                f = fidelity(post, bell_state(1, ("D'", "E")))
                branches.append(((a, b, c), pa * pb * pc, post, f))
    return SuperactivationResult(checkpoints, branches)


# -- GHZ extension ----------------------------------------------------------------

def ghz_kraus() -> KrausChannel:
    """K0 = |0><00| + |1><11|, K1 = |0><01| + |1><10| (two qubits -> one)."""
    k0 = np.zeros((2, 4), dtype=complex)
    k1 = np.zeros((2, 4), dtype=complex)
    k0[0, 0] = k0[1, 3] = 1
    k1[0, 1] = k1[1, 2] = 1
    return KrausChannel((k0, k1), (0, 1))


@dataclass
class GhzExtensionResult:
    branches: list
    distribution: JointDistribution
    exact: bool

    @property
    def fidelity(self) -> float:
        return min(b[-1] for b in self.branches)


def ghz_extend(parties=("A", "B", "C", "D")) -> GhzExtensionResult:
    """Extend a GHZ state on the first three parties to all four.

    Each party applies the two-to-one Kraus instrument to its (GHZ-side,
    Smolin-side) qubits; the last party flips its qubit when the announced
    outcomes have odd sum.
    """
    g = [p + "_g" for p in parties]
    s = [p + "_s" for p in parties]
    eta = tensor(ghz_state(g[:3]), plus_state(g[3]))
    mu = tensor(eta.density(), smolin_state(tuple(s)))
    kraus = ghz_kraus()
    target = ghz_state(list(parties))
    branches, rows = [], {}
    for outcome in itertools.product(kraus.outcomes, repeat=len(parties)):
        rho = mu
        for p, gq, sq, k in zip(parties, g, s, outcome):
            rho = apply_operator(rho, kraus.operators[k], [gq, sq], out_labels=[p], out_dims=[2])
        p_branch, state = normalized(rho)
        if state is None:
            continue
        state = state.reorder(parties)
        v = sum(outcome) % 2
        if v:
            state = apply_unitary(state, X, parties[-1])
        branches.append((outcome, p_branch, state, fidelity(state, target)))
        rows[tuple(str(k) for k in outcome)] = p_branch
    regs = [RegisterSpec(f"k_{p}", ("0", "1"), PUBLIC) for p in parties]
    table, exact = {}, True
    for sym, p in rows.items():
        q = Fraction(p).limit_denominator(2**16)
        exact &= abs(float(q) - p) <= ATOL
        table[sym] = q
    total = sum(table.values(), Fraction(0))
    if total != 1:
        exact = False
        table = {k: v / total for k, v in table.items()}
    return GhzExtensionResult(branches, JointDistribution(regs, table), exact)


def superactivation_key_distribution(result: SuperactivationResult) -> JointDistribution:
    """Computational-basis key bits of David and Elena with every announcement.

    Announcements (Alice's, Bob's and Clare's Bell outcomes) are public
    registers ``bell_A``, ``bell_B``, ``bell_C``.
    """
    regs = [RegisterSpec(n, ("1", "2", "3", "4"), PUBLIC) for n in ("bell_A", "bell_B", "bell_C")]
    regs += [RegisterSpec("D'", ("0", "1"), "D"), RegisterSpec("E", ("0", "1"), "E")]
    table = {}
    for (a, b, c), p, post, _ in result.branches:
        post = post.reorder(("D'", "E"))
        diag = np.diag(post.matrix).real
        for k, (x, y) in enumerate(itertools.product("01", repeat=2)):
            q = Fraction(float(p * diag[k])).limit_denominator(2**16)
            if q:
                table[(str(a), str(b), str(c), x, y)] = q
    return JointDistribution(regs, table)


def ppt_report(rho: DensityOperator) -> dict:
    """Minimum partial-transpose eigenvalue for every proper cut (up to complement)."""
    labels = list(rho.labels)
    out = {}
    for r in range(1, len(labels) // 2 + 1):
        for cut in itertools.combinations(labels, r):
            rest = tuple(n for n in labels if n not in cut)
            if 2 * r == len(labels) and rest < cut:
                continue
            key = "".join(cut) + ":" + "".join(rest)
            out[key] = float(np.linalg.eigvalsh(partial_transpose(rho, cut).matrix).min())
    return out
