"""States, encoding unitaries and measurement families of the 2-1 dense coding protocol.

The receiver holds three qubits in wire order (A, A1, A2); A1 carries
whatever comes back on sender 1's channel and A2 the same for sender 2.
All kets follow the most-significant-leftmost index convention of
:mod:`sdc21.linalg`.

Label conventions (all bits):
  (x, y)  sender 1's two encoded key bits
  (z, s)  sender 2's key bit and the publicly announced auxiliary bit
  (i, j, k)  the receiver's decoded bits for the three message bits
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .linalg import ID2, PAULI_X, PAULI_Y, PAULI_Z, PureStateVec, proj, tensor_all

FAMILY_TOL = 1e-12


@dataclass(frozen=True)
class MeasurementFamily:
    """A labeled, complete family of orthogonal projectors on an n-qubit space."""

    name: str
    projectors: tuple
    dim: int

    def __post_init__(self):
        labels = [lab for lab, _ in self.projectors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"{self.name}: duplicate projector labels")
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for lab, p in self.projectors:
            if p.shape != (self.dim, self.dim):
                raise ValueError(f"{self.name}: projector {lab} has wrong shape")
            if np.abs(p - p.conj().T).max() > FAMILY_TOL:
                raise ValueError(f"{self.name}: projector {lab} is not Hermitian")
            if np.abs(p @ p - p).max() > FAMILY_TOL:
                raise ValueError(f"{self.name}: projector {lab} is not idempotent")
            total += p
        if np.abs(total - np.eye(self.dim)).max() > FAMILY_TOL:
            raise ValueError(f"{self.name}: projectors do not sum to the identity")

    def projector(self, label) -> np.ndarray:
        for lab, p in self.projectors:
            if lab == label:
                return p
        raise KeyError(f"{self.name}: no projector labeled {label}")

    def outcome_probabilities(self, mat: np.ndarray) -> dict:
        """Born probabilities tr(P rho) for each label (rho may be unnormalized)."""
        return {lab: float(np.trace(p @ mat).real) for lab, p in self.projectors}


def zbasis_vec(a: int) -> PureStateVec:
    v = np.zeros(2, dtype=complex)
    v[a & 1] = 1.0
    return PureStateVec(v)


def xbasis_vec(a: int) -> PureStateVec:
    """Sigma-x eigenvector (|0> + (-1)^a |1>)/sqrt(2)."""
    return PureStateVec(np.array([1.0, (-1.0) ** (a & 1)], dtype=complex) / np.sqrt(2))


def ghz3() -> PureStateVec:
    """Three-qubit GHZ state (|000> + |111>)/sqrt(2)."""
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / np.sqrt(2)
    return PureStateVec(v)


def bell(x: int, y: int) -> PureStateVec:
    """Bell state (1/sqrt(2)) sum_l (-1)^(l*y) |l, x xor l>."""
    v = np.zeros(4, dtype=complex)
    for l in (0, 1):
        v[2 * l + (x ^ l)] = (-1.0) ** (l * y) / np.sqrt(2)
    return PureStateVec(v)


def g_state(s: int, i: int, j: int, k: int) -> PureStateVec:
    """Element of the three-qubit GHZ-like basis, labeling parameterized by s.

    |G^s(i,j,k)> = (1/sqrt(2)) sum_l (-1)^(l*(j xor s)) |l, i xor l, k xor l>,
    so g_state(1, i, j, k) == g_state(0, i, j^1, k).
    """
    v = np.zeros(8, dtype=complex)
    for l in (0, 1):
        idx = 4 * l + 2 * (i ^ l) + (k ^ l)
        v[idx] = (-1.0) ** (l * (j ^ s)) / np.sqrt(2)
    return PureStateVec(v)


def encoding_unitary(x: int, y: int) -> np.ndarray:
    """Single-qubit encoding for a two-bit message: I, sigma_z, sigma_x, -i sigma_y."""
    if (x, y) == (0, 0):
        return ID2.copy()
    if (x, y) == (0, 1):
        return PAULI_Z.copy()
    if (x, y) == (1, 0):
        return PAULI_X.copy()
    if (x, y) == (1, 1):
        return -1j * PAULI_Y
    raise ValueError(f"encoding bits must be 0 or 1, got {(x, y)}")


def alice_key_family(s: int, rank: int) -> MeasurementFamily:
    """Receiver's key-run measurement at announced bit ``s``.

    rank 1: eight rank-one projectors labeled (i, j, k) onto the G^s basis.
    rank 2: four projectors labeled (i, j), each summing over k.
    rank 4: two projectors labeled (k,), each summing over (i, j).
    """
    if s not in (0, 1):
        raise ValueError(f"s must be 0 or 1, got {s}")
    rank1 = {(i, j, k): proj(g_state(s, i, j, k).amps) for i, j, k in product((0, 1), repeat=3)}
    if rank == 1:
        projs = tuple(((i, j, k), rank1[(i, j, k)]) for i, j, k in product((0, 1), repeat=3))
    elif rank == 2:
        projs = tuple(
            ((i, j), sum(rank1[(i, j, k)] for k in (0, 1))) for i, j in product((0, 1), repeat=2)
        )
    elif rank == 4:
        projs = tuple(
            ((k,), sum(rank1[(i, j, k)] for i, j in product((0, 1), repeat=2))) for k in (0, 1)
        )
    else:
        raise ValueError(f"rank must be 1, 2 or 4, got {rank}")
    return MeasurementFamily(f"alice-key-s{s}-rank{rank}", projs, 8)


def alice_test_family_b1() -> MeasurementFamily:
    """Receiver's test measurement toward sender 1: |i><i| x |j_x><j_x| x I."""
    projs = tuple(
        ((i, j), tensor_all(proj(zbasis_vec(i).amps), proj(xbasis_vec(j).amps), ID2))
        for i, j in product((0, 1), repeat=2)
    )
    return MeasurementFamily("alice-test-b1", projs, 8)


def alice_test_family_b2(s: int) -> MeasurementFamily:
    """Receiver's test measurement toward sender 2: I x I x |(k xor s)_x><(k xor s)_x|."""
    if s not in (0, 1):
        raise ValueError(f"s must be 0 or 1, got {s}")
    projs = tuple(
        ((k,), tensor_all(ID2, ID2, proj(xbasis_vec(k ^ s).amps))) for k in (0, 1)
    )
    return MeasurementFamily(f"alice-test-b2-s{s}", projs, 8)


def bob_purified_families() -> tuple:
    """The senders' purified two-qubit measurements (wire order: travelling qubit, ancilla).

    Returns (bob1 key, bob2 key, bob1 test, bob2 test):
      bob1 key:  Bell projectors labeled (x, y)
      bob2 key:  Bell projectors labeled (z, s)
      bob1 test: |x, y_x><x, y_x| labeled (x, y)
      bob2 test: |z_x, (z xor s)_x><...| labeled (z, s)
    """
    bell_xy = tuple(
        ((x, y), proj(bell(x, y).amps)) for x, y in product((0, 1), repeat=2)
    )
    b1_key = MeasurementFamily("bob1-key", bell_xy, 4)
    b2_key = MeasurementFamily(
        "bob2-key", tuple(((z, s), proj(bell(z, s).amps)) for z, s in product((0, 1), repeat=2)), 4
    )
    b1_test = MeasurementFamily(
        "bob1-test",
        tuple(
            ((x, y), np.kron(proj(zbasis_vec(x).amps), proj(xbasis_vec(y).amps)))
            for x, y in product((0, 1), repeat=2)
        ),
        4,
    )
    b2_test = MeasurementFamily(
        "bob2-test",
        tuple(
            ((z, s), np.kron(proj(xbasis_vec(z).amps), proj(xbasis_vec(z ^ s).amps)))
            for z, s in product((0, 1), repeat=2)
        ),
        4,
    )
    return b1_key, b2_key, b1_test, b2_test
