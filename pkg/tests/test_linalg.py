"""Kernel tests: tensor algebra, partial trace, channels, eigenvalues, distances."""

import numpy as np
import pytest

from sdc21.channels import amplitude_damping, depolarizing
from sdc21.linalg import (
    ID2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityOp,
    PureStateVec,
    apply_kraus,
    apply_kraus_on_wires,
    dagger,
    embed_on_wires,
    hermitian_eigenvalues,
    operator_inf_norm,
    partial_trace,
    partial_trace_mat,
    permute_qubits,
    proj,
    psd_sqrt,
    tensor,
    tensor_all,
    trace_distance,
)
from sdc21.states import bell, ghz3, xbasis_vec, zbasis_vec


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ dagger(m)
    return rho / np.trace(rho).real


def test_tensor_identity_case():
    assert np.array_equal(tensor(ID2, ID2), np.eye(4))


def test_tensor_pauli_x_pair_is_antidiagonal():
    expected = np.fliplr(np.eye(4))
    assert np.array_equal(tensor(PAULI_X, PAULI_X), expected)


def test_tensor_pauli_z_pair():
    # direct Kronecker expansion, frozen
    assert np.array_equal(tensor(PAULI_Z, PAULI_Z), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_tensor_associative_and_mixed_product():
    # entry products of the protocol's operator constants are exact, so
    # associativity holds with exact equality there
    for triple in ((ID2, PAULI_X, PAULI_Z), (PAULI_Y, PAULI_Y, ID2)):
        a, b, c = triple
        assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))
    rng = np.random.default_rng(7)
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    assert np.abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c))).max() < 1e-12
    lhs = tensor(a, b) @ tensor(c, d)
    rhs = tensor(a @ c, b @ d)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_partial_trace_ghz_marginal():
    rho = ghz3().density()
    reduced = partial_trace(rho, [2, 2, 2], keep=[0])
    assert np.abs(reduced.mat - np.diag([0.5, 0.5])).max() < 1e-12


def test_partial_trace_bell_marginal():
    rho = bell(0, 0).density()
    reduced = partial_trace(rho, [2, 2], keep=[0])
    assert np.abs(reduced.mat - ID2 / 2).max() < 1e-12


def test_partial_trace_product_state():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 4)
    joint = DensityOp(tensor(proj(zbasis_vec(0).amps), rho))
    reduced = partial_trace(joint, [2, 2, 2], keep=[1, 2])
    assert np.abs(reduced.mat - rho).max() < 1e-12


def test_partial_trace_keeps_relative_order():
    rng = np.random.default_rng(4)
    a, b = random_density(rng, 2), random_density(rng, 4)
    joint = tensor(a, b)
    reduced = partial_trace_mat(joint, 3, keep=[1, 2])
    assert np.abs(reduced - b).max() < 1e-12


def test_partial_trace_errors():
    rho = ghz3().density()
    with pytest.raises(ValueError):
        partial_trace(rho, [2, 2, 2], keep=[])
    with pytest.raises(ValueError):
        partial_trace(rho, [2, 2, 2], keep=[3])


def test_apply_kraus_identity_channel():
    rng = np.random.default_rng(5)
    rho = DensityOp(random_density(rng, 2))
    out = apply_kraus([ID2], rho)
    assert np.abs(out.mat - rho.mat).max() < 1e-12


def test_apply_kraus_full_depolarizing_against_pauli_twirl():
    # independent oracle: sum_i sigma_i rho sigma_i (incl. identity) = 2 tr(rho) I
    rng = np.random.default_rng(6)
    rho = random_density(rng, 2)
    twirl = sum(p @ rho @ dagger(p) for p in (ID2, PAULI_X, PAULI_Y, PAULI_Z))
    assert np.abs(twirl - 2 * np.trace(rho) * ID2).max() < 1e-12
    out = apply_kraus(depolarizing(1.0), DensityOp(rho))
    assert np.abs(out.mat - ID2 / 2).max() < 1e-12


def test_apply_kraus_amplitude_damping_full_decay():
    out = apply_kraus(amplitude_damping(1.0), DensityOp(proj(zbasis_vec(1).amps)))
    assert np.abs(out.mat - proj(zbasis_vec(0).amps)).max() < 1e-12


def test_apply_kraus_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_kraus([np.eye(4)], DensityOp(ID2 / 2))


def test_apply_kraus_rejects_incomplete_channel():
    with pytest.raises(ValueError):
        apply_kraus([0.9 * ID2], DensityOp(ID2 / 2))


def test_no_signalling_partial_trace_commutes_with_local_channel():
    rng = np.random.default_rng(8)
    rho = random_density(rng, 8)
    for channel in (depolarizing(0.4), amplitude_damping(0.7)):
        noised = apply_kraus_on_wires(channel, (1,), rho, 3)
        lhs = partial_trace_mat(noised, 3, keep=[0, 2])
        rhs = partial_trace_mat(rho, 3, keep=[0, 2])
        assert np.abs(lhs - rhs).max() < 1e-12


def test_hermitian_eigenvalues_examples():
    assert np.allclose(hermitian_eigenvalues(PAULI_Z), [1.0, -1.0])
    assert np.allclose(hermitian_eigenvalues(np.eye(4) / 4), [0.25] * 4)
    assert np.allclose(hermitian_eigenvalues(tensor(PAULI_X, PAULI_X)), [1, 1, -1, -1])


def test_hermitian_eigenvalues_sum_matches_trace():
    rng = np.random.default_rng(9)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = (m + dagger(m)) / 2
    assert abs(hermitian_eigenvalues(h).sum() - np.trace(h).real) < 1e-9


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))


def test_operator_inf_norm_examples():
    assert abs(operator_inf_norm(proj(xbasis_vec(0).amps)) - 1.0) < 1e-12
    assert abs(operator_inf_norm(ID2 / 4) - 0.25) < 1e-12
    # the overlap operator from the uncertainty-relation bound
    op = tensor_all(proj(zbasis_vec(0).amps), proj(xbasis_vec(1).amps), ID2) / 4
    assert abs(operator_inf_norm(op) - 0.25) < 1e-12


def test_operator_inf_norm_rejects_negative():
    with pytest.raises(ValueError):
        operator_inf_norm(-ID2)


def test_trace_distance_examples():
    rho = ghz3().density()
    assert trace_distance(rho, rho) == 0
    zero, one = proj(zbasis_vec(0).amps), proj(zbasis_vec(1).amps)
    assert abs(trace_distance(DensityOp(zero), DensityOp(one)) - 1.0) < 1e-12
    assert abs(trace_distance(DensityOp(zero), DensityOp(ID2 / 2)) - 0.5) < 1e-12


def test_trace_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        trace_distance(DensityOp(ID2 / 2), ghz3().density())


def test_density_op_validation():
    with pytest.raises(ValueError):
        DensityOp(np.array([[0, 1], [0, 0]], dtype=complex))  # not Hermitian
    with pytest.raises(ValueError):
        DensityOp(ID2)  # trace 2
    with pytest.raises(ValueError):
        DensityOp(np.diag([1.5, -0.5]).astype(complex))  # negative eigenvalue


def test_pure_state_norm_validation():
    with pytest.raises(ValueError):
        PureStateVec(np.array([1.0, 1.0]))


def test_embed_on_wires_matches_manual_permutation():
    rng = np.random.default_rng(10)
    op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    # acting on wires (2, 0) of three qubits == permute so those wires lead, act, permute back
    embedded = embed_on_wires(op, (2, 0), 3)
    manual = permute_qubits(tensor(op, ID2), (1, 2, 0))
    assert np.abs(embedded - manual).max() < 1e-12


def test_permute_qubits_round_trip():
    rng = np.random.default_rng(11)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    fwd = permute_qubits(m, (2, 0, 1))
    # inverse permutation: new position of old wire w
    back = permute_qubits(fwd, (1, 2, 0))
    assert np.abs(back - m).max() < 1e-12


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(12)
    rho = random_density(rng, 4)
    root = psd_sqrt(rho)
    assert np.abs(root @ root - rho).max() < 1e-12
