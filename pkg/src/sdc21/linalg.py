"""Dense complex linear algebra for operators on small tensor products of qubits.

Everything here works on plain ``numpy`` arrays of ``complex128``; the two
wrapper types ``DensityOp`` and ``PureStateVec`` only add validation at the
points where a physical state is handed between modules. Dimensions stay at
or below 2**7, so all operations are exact dense computations.

Index convention used throughout the package: the leftmost tensor factor is
the most significant bit of the computational-basis index, i.e. the basis
state of qubits (b0, b1, ..., b_{n-1}) has index sum(b_w << (n-1-w)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
EIG_FLOOR = -1e-9

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def proj(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector |v><v| of a (not necessarily normalized) vector."""
    v = np.asarray(vec, dtype=complex).ravel()
    return np.outer(v, v.conj())


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.abs(m - dagger(m)).max())


@dataclass(frozen=True)
class PureStateVec:
    """State vector of one or more qubits, unit norm within 1e-12."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).ravel()
        if not np.all(np.isfinite(amps)):
            raise ValueError("state vector has non-finite amplitudes")
        if not is_power_of_two(amps.size):
            raise ValueError(f"dimension {amps.size} is not a power of two")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector norm {norm} deviates from 1 beyond 1e-12")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    def density(self) -> "DensityOp":
        return DensityOp(proj(self.amps))

    def overlap(self, other: "PureStateVec") -> complex:
        return complex(self.amps.conj() @ other.amps)


@dataclass(frozen=True)
class DensityOp:
    """Hermitian, unit-trace, positive operator on an n-qubit space."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density operator must be square, got shape {mat.shape}")
        if not is_power_of_two(mat.shape[0]):
            raise ValueError(f"dimension {mat.shape[0]} is not a power of two")
        if not np.all(np.isfinite(mat)):
            raise ValueError("density operator has non-finite entries")
        defect = hermiticity_defect(mat)
        if defect > HERMITICITY_TOL:
            raise ValueError(f"hermiticity defect {defect} exceeds {HERMITICITY_TOL}")
        mat = (mat + dagger(mat)) / 2
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {TRACE_TOL}")
        if float(np.linalg.eigvalsh(mat)[0]) < EIG_FLOOR:
            raise ValueError("density operator has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a``'s index most significant."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(*ops: np.ndarray) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def _as_matrix(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityOp) else np.asarray(rho, dtype=complex)


def partial_trace_mat(mat: np.ndarray, num_qubits: int, keep: Iterable[int]) -> np.ndarray:
    """Partial trace of an operator over all qubit wires not in ``keep``.

    Kept wires stay in their original relative order. Works on arbitrary
    (also non-normalized) operators.
    """
    keep = sorted(set(int(w) for w in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= num_qubits:
        raise ValueError(f"keep indices {keep} out of range for {num_qubits} qubits")
    t = np.asarray(mat, dtype=complex).reshape((2,) * (2 * num_qubits))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:num_qubits])
    col = list(letters[num_qubits : 2 * num_qubits])
    for w in range(num_qubits):
        if w not in keep:
            col[w] = row[w]
    out = "".join(row[w] for w in keep) + "".join(letters[num_qubits + w] for w in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = 2 ** len(keep)
    return reduced.reshape(d, d)


def partial_trace(rho: DensityOp, qubit_dims: Sequence[int], keep: Iterable[int]) -> DensityOp:
    """Reduced state of ``rho`` on the subsystems listed in ``keep``.

    ``qubit_dims`` must be all twos; it fixes the number of wires.
    """
    if any(d != 2 for d in qubit_dims):
        raise ValueError("only qubit subsystems are supported")
    n = len(qubit_dims)
    if 2**n != rho.dim:
        raise ValueError(f"subsystem dims {qubit_dims} do not match operator dim {rho.dim}")
    return DensityOp(partial_trace_mat(rho.mat, n, keep))


@lru_cache(maxsize=None)
def _wire_index_map(order: tuple, num_qubits: int) -> np.ndarray:
    """Basis-index permutation sending wire ordering ``order`` to canonical order."""
    n = num_qubits
    idx = np.arange(2**n)
    out = np.zeros_like(idx)
    for pos, w in enumerate(order):
        bit = (idx >> (n - 1 - w)) & 1
        out |= bit << (n - 1 - pos)
    return out


def embed_on_wires(op: np.ndarray, wires: Sequence[int], num_qubits: int) -> np.ndarray:
    """Embed a k-qubit operator acting on the given wires of an n-qubit space.

    ``wires`` gives the operator's own qubit order, so e.g. a two-qubit gate
    on wires (2, 0) acts with its first factor on wire 2.
    """
    wires = tuple(int(w) for w in wires)
    if len(set(wires)) != len(wires):
        raise ValueError("wires must be distinct")
    if any(w < 0 or w >= num_qubits for w in wires):
        raise ValueError(f"wires {wires} out of range for {num_qubits} qubits")
    k = len(wires)
    if np.asarray(op).shape != (2**k, 2**k):
        raise ValueError("operator shape does not match wire count")
    rest = tuple(w for w in range(num_qubits) if w not in wires)
    full = np.kron(np.asarray(op, dtype=complex), np.eye(2 ** len(rest), dtype=complex))
    perm = _wire_index_map(wires + rest, num_qubits)
    return full[np.ix_(perm, perm)]


def permute_qubits(mat: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder the wires of an n-qubit operator; ``order[pos]`` is the old wire
    that ends up at new position ``pos``."""
    order = tuple(int(w) for w in order)
    n = len(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation")
    m = np.asarray(mat, dtype=complex)
    if m.shape != (2**n, 2**n):
        raise ValueError("operator shape does not match permutation length")
    # new index x picks, at position pos, the bit the old index had at wire order[pos]
    idx = np.arange(2**n)
    src = np.zeros_like(idx)
    for pos, w in enumerate(order):
        bit = (idx >> (n - 1 - pos)) & 1
        src |= bit << (n - 1 - w)
    return m[np.ix_(src, src)]


def apply_kraus(channel, rho):
    """Apply a CPTP channel, given as a KrausSet or a sequence of matrices.

    Returns the same kind of object it was given (DensityOp in, DensityOp out).
    """
    ops = list(getattr(channel, "operators", channel))
    mat = _as_matrix(rho)
    d = mat.shape[0]
    if any(op.shape != (d, d) for op in ops):
        raise ValueError("channel dimension does not match state dimension")
    comp = sum(dagger(op) @ op for op in ops)
    if np.abs(comp - np.eye(d)).max() > 1e-12:
        raise ValueError("Kraus operators fail the completeness check")
    out = sum(op @ mat @ dagger(op) for op in ops)
    return DensityOp(out) if isinstance(rho, DensityOp) else out


def apply_kraus_on_wires(channel, wires: Sequence[int], mat: np.ndarray, num_qubits: int) -> np.ndarray:
    """Apply a channel to a subset of wires of an n-qubit operator (no validation)."""
    ops = [embed_on_wires(op, wires, num_qubits) for op in getattr(channel, "operators", channel)]
    return sum(op @ mat @ dagger(op) for op in ops)


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted descending.

    Inputs with a hermiticity defect below 1e-10 are symmetrized first;
    anything worse is rejected.
    """
    mat = np.asarray(m, dtype=complex)
    defect = hermiticity_defect(mat)
    if defect > HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian (defect {defect})")
    mat = (mat + dagger(mat)) / 2
    return np.linalg.eigvalsh(mat)[::-1]


def operator_inf_norm(m: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian positive semidefinite matrix."""
    eigs = hermitian_eigenvalues(m)
    if eigs[-1] < EIG_FLOOR:
        raise ValueError(f"matrix has negative eigenvalue {eigs[-1]} beyond tolerance")
    return float(eigs[0])


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Positive square root of a Hermitian PSD matrix (tiny negatives clipped)."""
    mat = np.asarray(m, dtype=complex)
    mat = (mat + dagger(mat)) / 2
    vals, vecs = np.linalg.eigh(mat)
    if vals[0] < EIG_FLOOR:
        raise ValueError(f"matrix has negative eigenvalue {vals[0]} beyond tolerance")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ dagger(vecs)


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(hermitian_eigenvalues(m)).sum())


def trace_distance(a, b) -> float:
    """(1/2) * trace norm of the difference of two density operators."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return 0.5 * trace_norm(ma - mb)
