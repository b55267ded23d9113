"""Executable checks of the teleportation-based purification of the protocol.

The purified picture replaces each sender's action by one joint two-qubit
projective measurement on his travelling qubit and half of a local Bell
pair; the other half becomes the wire sent back. All computations here run
on the seven-wire space with the fixed canonical order

    position 0: A     receiver's retained qubit
    position 1: B1    sender 1's travelling qubit
    position 2: B2    sender 2's travelling qubit
    position 3: B1'   sender 1's ancilla (measured with B1)
    position 4: X1    sender 1's returned wire
    position 5: B2'   sender 2's ancilla
    position 6: X2    sender 2's returned wire

The equalities verified here are exact operator identities, so every
function returns the worst observed trace-norm discrepancy, which a correct
build keeps at rounding level.

Comparisons are made between outcome-weighted objects: the purified side is
the unnormalized post-measurement operator, the direct side is the
project-insert-encode construction multiplied by the probability of the
senders' classical choices (1/4 per Bell outcome pair, 1/2 per prepared
bit). Both sides then carry identical traces and the identity is checked
with no free normalization constant.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .channels import NoiseScenario
from .linalg import (
    DensityOp,
    apply_kraus_on_wires,
    embed_on_wires,
    partial_trace_mat,
    permute_qubits,
    proj,
    tensor,
    trace_norm,
)
from .protocol import keygen_distribution, shared_state
from .states import bell, bob_purified_families, encoding_unitary, xbasis_vec, zbasis_vec

_KEEP_AX1X2 = (0, 4, 6)
_B1_PAIR = (1, 3)
_B2_PAIR = (2, 5)


def _extended_state(rho8: np.ndarray) -> np.ndarray:
    """rho_{A B1 B2} tensored with the two ancilla Bell pairs, in canonical wire order."""
    phi = proj(bell(0, 0).amps)
    full = tensor(tensor(rho8, phi), phi)
    # tensor order is (A,B1,B2),(B1',X1),(B2',X2) which is already canonical
    return full


def _project_and_reduce(rho8: np.ndarray, proj_b1: np.ndarray, proj_b2: np.ndarray) -> np.ndarray:
    """Unnormalized operator on (A, X1, X2) after the senders' joint projections."""
    full = _extended_state(rho8)
    p = embed_on_wires(proj_b1, _B1_PAIR, 7) @ embed_on_wires(proj_b2, _B2_PAIR, 7)
    return partial_trace_mat(p @ full @ p, 7, keep=_KEEP_AX1X2)


def purified_encoding(rho: DensityOp, x: int, y: int, z: int, s: int) -> DensityOp:
    """Key-run encoding realized by Bell measurements on ancilla halves.

    Returns 4^2 times the reduced post-measurement operator on (A, X1, X2);
    the Bell outcomes are uniform, so the factor normalizes the result.
    """
    if rho.dim != 8:
        raise ValueError(f"expected a three-qubit state, got dimension {rho.dim}")
    out = 16 * _project_and_reduce(rho.mat, proj(bell(x, y).amps), proj(bell(z, s).amps))
    return DensityOp(out)


def purified_outcome_probability(rho: DensityOp, x: int, y: int, z: int, s: int) -> float:
    """Probability of Bell outcomes ((x,y),(z,s)) in the purified key run."""
    unnorm = _project_and_reduce(rho.mat, proj(bell(x, y).amps), proj(bell(z, s).amps))
    return float(np.trace(unnorm).real)


def verify_encoding_purification(scenario: NoiseScenario) -> float:
    """Worst trace distance between direct unitary encoding and its purification."""
    rho = shared_state(scenario)
    worst = 0.0
    for x, y, z, s in product((0, 1), repeat=4):
        u = embed_on_wires(tensor(encoding_unitary(x, y), encoding_unitary(z, s)), (1, 2), 3)
        direct = u @ rho.mat @ u.conj().T
        purified = purified_encoding(rho, x, y, z, s).mat
        worst = max(worst, 0.5 * trace_norm(purified - direct))
    return worst


def _direct_test_key(rho8: np.ndarray, x, y, z, s) -> np.ndarray:
    """Sender 1 tests, sender 2 keys: outcome-weighted state on (A, X1, X2)."""
    p1 = embed_on_wires(proj(zbasis_vec(x).amps), (1,), 3)
    reduced = partial_trace_mat(p1 @ rho8 @ p1, 3, keep=(0, 2))  # (A, B2)
    u = embed_on_wires(encoding_unitary(z, s), (1,), 2)
    encoded = u @ reduced @ u.conj().T
    out = permute_qubits(tensor(encoded, proj(xbasis_vec(y).amps)), (0, 2, 1))
    return out / 8  # 1/2 for the prepared bit, 1/4 for the Bell outcome


def _direct_key_test(rho8: np.ndarray, x, y, z, s) -> np.ndarray:
    """Sender 1 keys, sender 2 tests: outcome-weighted state on (A, X1, X2)."""
    u = embed_on_wires(encoding_unitary(x, y), (1,), 3)
    encoded = u @ rho8 @ u.conj().T
    p2 = embed_on_wires(proj(xbasis_vec(z).amps), (2,), 3)
    reduced = partial_trace_mat(p2 @ encoded @ p2, 3, keep=(0, 1))  # (A, X1)
    return tensor(reduced, proj(xbasis_vec(z ^ s).amps)) / 8


def _direct_test_test(rho8: np.ndarray, x, y, z, s) -> np.ndarray:
    """Both senders test: the receiver's qubit collapses, both probes are fresh."""
    p = embed_on_wires(tensor(proj(zbasis_vec(x).amps), proj(xbasis_vec(z).amps)), (1, 2), 3)
    reduced = partial_trace_mat(p @ rho8 @ p, 3, keep=(0,))  # A alone
    out = tensor(tensor(reduced, proj(xbasis_vec(y).amps)), proj(xbasis_vec(z ^ s).amps))
    return out / 4  # 1/2 per prepared bit


def verify_mixed_purifications(scenario: NoiseScenario) -> float:
    """Worst trace-norm gap over the three mixed test/key purification identities."""
    rho8 = shared_state(scenario).mat
    _, _, b1_test, b2_test = bob_purified_families()
    worst = 0.0
    for x, y, z, s in product((0, 1), repeat=4):
        cases = (
            (_direct_test_key, b1_test.projector((x, y)), proj(bell(z, s).amps)),
            (_direct_key_test, proj(bell(x, y).amps), b2_test.projector((z, s))),
            (_direct_test_test, b1_test.projector((x, y)), b2_test.projector((z, s))),
        )
        for direct_fn, pb1, pb2 in cases:
            purified = _project_and_reduce(rho8, pb1, pb2)
            direct = direct_fn(rho8, x, y, z, s)
            worst = max(worst, 0.5 * trace_norm(purified - direct))
    return worst


def verify_backward_commutation(scenario: NoiseScenario) -> float:
    """Return-leg noise commutes with the senders' measurements.

    Applies the backward channel to the X wires of the extended state before
    the Bell projections, and alternatively to the reduced three-wire result
    afterwards; the two orders must agree.
    """
    rho8 = shared_state(scenario).mat
    worst = 0.0
    for x, y, z, s in product((0, 1), repeat=4):
        pb1, pb2 = proj(bell(x, y).amps), proj(bell(z, s).amps)
        full = _extended_state(rho8)
        noisy_first = apply_kraus_on_wires(scenario.backward, (4, 6), full, 7)
        p = embed_on_wires(pb1, _B1_PAIR, 7) @ embed_on_wires(pb2, _B2_PAIR, 7)
        before = partial_trace_mat(p @ noisy_first @ p, 7, keep=_KEEP_AX1X2)
        after = apply_kraus_on_wires(
            scenario.backward, (1, 2), _project_and_reduce(rho8, pb1, pb2), 3
        )
        worst = max(worst, np.abs(before - after).max())
    return worst


def verify_uniform_outcome_probability(scenario: NoiseScenario) -> float:
    """Worst deviation of the key-run marginal p(x, y; z, s) from 1/16."""
    marg = keygen_distribution(scenario).marginal(("x", "y", "z", "s"))
    return float(np.abs(marg.table - 1 / 16).max())
