"""Noise model constructors and scenario assembly."""

import numpy as np
import pytest

from sdc21.channels import (
    KrausSet,
    amplitude_damping,
    correlated_depolarizing,
    depolarizing,
    identity_channel,
    make_scenario,
    product2,
)
from sdc21.linalg import ID2, PAULI_X, dagger, partial_trace_mat, proj
from sdc21.states import bell, encoding_unitary, zbasis_vec


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ dagger(m)
    return rho / np.trace(rho).real


def test_depolarizing_endpoints():
    rng = np.random.default_rng(0)
    rho = random_density(rng, 2)
    assert np.abs(depolarizing(0.0).apply(rho) - rho).max() < 1e-12
    assert np.abs(depolarizing(1.0).apply(proj(zbasis_vec(0).amps)) - ID2 / 2).max() < 1e-12


def test_depolarizing_half():
    out = depolarizing(0.5).apply(proj(zbasis_vec(0).amps))
    assert np.abs(out - np.diag([0.75, 0.25])).max() < 1e-12


def test_depolarizing_range():
    with pytest.raises(ValueError):
        depolarizing(-0.1)
    with pytest.raises(ValueError):
        depolarizing(1.1)


def test_amplitude_damping_cases():
    rng = np.random.default_rng(1)
    rho = random_density(rng, 2)
    assert np.abs(amplitude_damping(0.0).apply(rho) - rho).max() < 1e-12
    one = proj(zbasis_vec(1).amps)
    assert np.abs(amplitude_damping(1.0).apply(one) - proj(zbasis_vec(0).amps)).max() < 1e-12
    assert np.abs(amplitude_damping(0.36).apply(one) - np.diag([0.36, 0.64])).max() < 1e-12


def test_correlated_depolarizing_cases():
    rng = np.random.default_rng(2)
    rho = random_density(rng, 4)
    assert np.abs(correlated_depolarizing(0.0).apply(rho) - rho).max() < 1e-12
    # |B(0,0)> is a fixed point: it is an eigenstate of every sigma_i x sigma_i
    bell00 = proj(bell(0, 0).amps)
    assert np.abs(correlated_depolarizing(1.0).apply(bell00) - bell00).max() < 1e-12
    out = correlated_depolarizing(1.0).apply(proj(np.array([1, 0, 0, 0], dtype=complex)))
    assert np.abs(out - np.diag([0.5, 0, 0, 0.5])).max() < 1e-12


def test_product2_cases():
    rng = np.random.default_rng(3)
    ident = identity_channel(1)
    rho = random_density(rng, 4)
    assert np.abs(product2(ident, ident).apply(rho) - rho).max() < 1e-12
    # locality: noise on the first wire leaves the second marginal unchanged
    noisy_first = product2(depolarizing(0.7), ident).apply(rho)
    assert np.abs(partial_trace_mat(noisy_first, 2, [1]) - partial_trace_mat(rho, 2, [1])).max() < 1e-12
    full = product2(depolarizing(1.0), depolarizing(1.0)).apply(rho)
    assert np.abs(full - np.eye(4) / 4).max() < 1e-12


def test_product2_rejects_two_qubit_inputs():
    with pytest.raises(ValueError):
        product2(identity_channel(2), identity_channel(1))


def test_kraus_completeness_enforced():
    with pytest.raises(ValueError):
        KrausSet((0.99 * ID2,))


def test_all_constructed_sets_complete():
    for ch in (
        depolarizing(0.3),
        amplitude_damping(0.8),
        correlated_depolarizing(0.6),
        product2(depolarizing(0.2), amplitude_damping(0.4)),
    ):
        comp = sum(dagger(op) @ op for op in ch.operators)
        assert np.abs(comp - np.eye(ch.dim)).max() < 1e-12


def test_depolarizing_commutes_with_encodings():
    rng = np.random.default_rng(4)
    rho = random_density(rng, 2)
    ch = depolarizing(0.45)
    for x in (0, 1):
        for y in (0, 1):
            u = encoding_unitary(x, y)
            lhs = ch.apply(u @ rho @ dagger(u))
            rhs = u @ ch.apply(rho) @ dagger(u)
            assert np.abs(lhs - rhs).max() < 1e-12


def test_amplitude_damping_does_not_commute_with_bit_flip():
    rng = np.random.default_rng(5)
    rho = random_density(rng, 2)
    ch = amplitude_damping(0.5)
    lhs = ch.apply(PAULI_X @ rho @ PAULI_X)
    rhs = PAULI_X @ ch.apply(rho) @ PAULI_X
    assert np.abs(lhs - rhs).max() > 1e-3


def test_make_scenario_identity():
    sc = make_scenario("identity")
    rng = np.random.default_rng(6)
    rho = random_density(rng, 4)
    assert np.abs(sc.forward.apply(rho) - rho).max() < 1e-12
    assert np.abs(sc.backward.apply(rho) - rho).max() < 1e-12


def test_make_scenario_depol_indep_uses_same_channel_both_ways():
    sc = make_scenario("depol-indep", lam=0.1, delta=0.2)
    ref = product2(depolarizing(0.1), depolarizing(0.2))
    rng = np.random.default_rng(7)
    rho = random_density(rng, 4)
    for ch in (sc.forward, sc.backward):
        assert np.abs(ch.apply(rho) - ref.apply(rho)).max() < 1e-12


def test_make_scenario_one_sided():
    rng = np.random.default_rng(8)
    rho = random_density(rng, 4)
    fwd = make_scenario("depol-forward-only", lam=0.5, delta=0.5)
    assert np.abs(fwd.backward.apply(rho) - rho).max() < 1e-12
    back = make_scenario("depol-backward-only", lam=0.5, delta=0.5)
    assert np.abs(back.forward.apply(rho) - rho).max() < 1e-12


def test_make_scenario_correlated_params():
    sc = make_scenario("depol-corr", lam_f=0.3, lam_b=0.7)
    assert sc.params == {"lam_f": 0.3, "lam_b": 0.7}
    rng = np.random.default_rng(9)
    rho = random_density(rng, 4)
    assert np.abs(sc.forward.apply(rho) - correlated_depolarizing(0.3).apply(rho)).max() < 1e-12
    assert np.abs(sc.backward.apply(rho) - correlated_depolarizing(0.7).apply(rho)).max() < 1e-12


def test_make_scenario_errors():
    with pytest.raises(ValueError):
        make_scenario("no-such-model")
    with pytest.raises(ValueError):
        make_scenario("depol-indep", lam=0.1)  # missing delta
    with pytest.raises(ValueError):
        make_scenario("identity", lam=0.1)  # unexpected parameter
    with pytest.raises(ValueError):
        make_scenario("ampdamp-indep", gamma1=1.5, gamma2=0.0)
