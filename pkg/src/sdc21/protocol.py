"""Exact outcome distributions of the 2-1 secure dense coding protocol.

Each run of the protocol is simulated directly on at most three qubits:
project-and-insert for test runs, unitary conjugation for key runs, one
joint two-qubit Kraus application for each transmission leg. The senders'
random choices enter as explicit uniform weights, so every returned table
is the exact joint distribution, not an estimate.

Wire order is always (A, A1-slot, A2-slot): wire 1 holds whatever travels
on sender 1's channel, wire 2 the same for sender 2.
"""

from __future__ import annotations

from dataclasses import dataclass
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
)
from .states import (
    alice_key_family,
    alice_test_family_b1,
    alice_test_family_b2,
    encoding_unitary,
    ghz3,
    xbasis_vec,
    zbasis_vec,
)

NEG_CLAMP = -1e-12
SUM_TOL = 1e-9
ZERO_MASS = 1e-14


@dataclass(frozen=True)
class LabeledDistribution:
    """Dense joint probability table over named binary variables."""

    variables: tuple
    table: np.ndarray

    def __post_init__(self):
        variables = tuple(str(v) for v in self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        table = np.asarray(self.table, dtype=float)
        if table.shape != (2,) * len(variables):
            raise ValueError(f"table shape {table.shape} does not match {len(variables)} bits")
        if table.min() < NEG_CLAMP:
            raise ValueError(f"negative probability {table.min()} beyond clamp tolerance")
        table = np.clip(table, 0.0, None)
        total = table.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        table.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "table", table)

    def _axes(self, names) -> list:
        try:
            return [self.variables.index(n) for n in names]
        except ValueError:
            raise KeyError(f"unknown variable among {tuple(names)}; have {self.variables}")

    def marginal(self, names) -> "LabeledDistribution":
        """Marginal on the named variables, kept in their original relative order."""
        names = tuple(names)
        keep = self._axes(names)
        drop = tuple(ax for ax in range(len(self.variables)) if ax not in keep)
        sub = self.table.sum(axis=drop) if drop else self.table
        order = tuple(v for v in self.variables if v in names)
        return LabeledDistribution(order, sub)

    def mass(self, **fixed) -> float:
        """Total probability of the cells matching the fixed bits."""
        idx = tuple(fixed.get(v, slice(None)) for v in self.variables)
        self._axes(fixed)
        return float(self.table[idx].sum())

    def condition(self, **fixed):
        """Distribution over the remaining variables given fixed bits.

        Returns None when the conditioning cell carries mass below 1e-14
        (the caller skips such cells with weight zero).
        """
        self._axes(fixed)
        idx = tuple(fixed.get(v, slice(None)) for v in self.variables)
        sub = np.asarray(self.table[idx], dtype=float)
        total = sub.sum()
        if total < ZERO_MASS:
            return None
        remaining = tuple(v for v in self.variables if v not in fixed)
        return LabeledDistribution(remaining, sub / total)


def shared_state(scenario: NoiseScenario) -> DensityOp:
    """Three-qubit state after distributing the GHZ state through the forward channel."""
    rho = proj(ghz3().amps)
    rho = apply_kraus_on_wires(scenario.forward, (1, 2), rho, 3)
    return DensityOp(rho)


def _backward(scenario: NoiseScenario, mat: np.ndarray) -> np.ndarray:
    return apply_kraus_on_wires(scenario.backward, (1, 2), mat, 3)


def keygen_distribution(scenario: NoiseScenario) -> LabeledDistribution:
    """Joint distribution over (i, j, k, x, y, z, s) when everyone runs key generation.

    Each of the 16 uniformly weighted encodings (x, y, z, s) is applied to
    the shared state, sent back, and decoded with the receiver's rank-one
    family labeled by the announced s.
    """
    rho = shared_state(scenario).mat
    table = np.zeros((2,) * 7)
    for x, y, z, s in product((0, 1), repeat=4):
        u = embed_on_wires(tensor(encoding_unitary(x, y), encoding_unitary(z, s)), (1, 2), 3)
        out = _backward(scenario, u @ rho @ u.conj().T)
        family = alice_key_family(s, rank=1)
        for (i, j, k), p in family.outcome_probabilities(out).items():
            table[i, j, k, x, y, z, s] = p / 16
    return LabeledDistribution(("i", "j", "k", "x", "y", "z", "s"), table)


def test_b1_distribution(scenario: NoiseScenario) -> LabeledDistribution:
    """Joint distribution over (i, j, x, y, z, s): sender 1 tests, sender 2 keys.

    Sender 1 measures his wire in the z basis (outcome x), replaces it with
    a fresh x-basis state |y_x> for uniform y; sender 2 encodes uniform
    (z, s); the receiver measures the z-x-identity test family. The weight
    of a cell is the collapse probability times 1/2 (choice of y) times 1/4
    (choice of z, s).
    """
    rho = shared_state(scenario).mat
    family = alice_test_family_b1()
    table = np.zeros((2,) * 6)
    for x in (0, 1):
        p1 = embed_on_wires(proj(zbasis_vec(x).amps), (1,), 3)
        reduced = partial_trace_mat(p1 @ rho @ p1, 3, keep=(0, 2))
        for y in (0, 1):
            with_probe = permute_qubits(tensor(reduced, proj(xbasis_vec(y).amps)), (0, 2, 1))
            for z, s in product((0, 1), repeat=2):
                u = embed_on_wires(encoding_unitary(z, s), (2,), 3)
                out = _backward(scenario, u @ with_probe @ u.conj().T)
                for (i, j), p in family.outcome_probabilities(out).items():
                    table[i, j, x, y, z, s] = p / 8
    return LabeledDistribution(("i", "j", "x", "y", "z", "s"), table)


def test_b2_distribution(scenario: NoiseScenario) -> LabeledDistribution:
    """Joint distribution over (k, x, y, z, s): sender 1 keys, sender 2 tests.

    Sender 2 measures his wire in the x basis (outcome z) and sends back a
    fresh x-basis state; announcing s means the prepared state is
    |(z xor s)_x>, with s uniform. The receiver measures the x-basis test
    family on her third wire, whose labeling depends on s.
    """
    rho = shared_state(scenario).mat
    table = np.zeros((2,) * 5)
    for x, y in product((0, 1), repeat=2):
        u1 = embed_on_wires(encoding_unitary(x, y), (1,), 3)
        encoded = u1 @ rho @ u1.conj().T
        for z in (0, 1):
            p2 = embed_on_wires(proj(xbasis_vec(z).amps), (2,), 3)
            reduced = partial_trace_mat(p2 @ encoded @ p2, 3, keep=(0, 1))
            for s in (0, 1):
                with_probe = tensor(reduced, proj(xbasis_vec(z ^ s).amps))
                out = _backward(scenario, with_probe)
                family = alice_test_family_b2(s)
                for (k,), p in family.outcome_probabilities(out).items():
                    table[k, x, y, z, s] = p / 8
    return LabeledDistribution(("k", "x", "y", "z", "s"), table)


def test_both_distribution(scenario: NoiseScenario) -> LabeledDistribution:
    """Senders' outcome distribution over (x, y, z, s) when both run test rounds.

    Only the senders' classical outcomes are produced; the receiver gains no
    usable statistics from these rounds and none are modeled.
    """
    rho = shared_state(scenario).mat
    table = np.zeros((2,) * 4)
    for x, z in product((0, 1), repeat=2):
        p = embed_on_wires(
            tensor(proj(zbasis_vec(x).amps), proj(xbasis_vec(z).amps)), (1, 2), 3
        )
        collapse = float(np.trace(p @ rho).real)
        for y, s in product((0, 1), repeat=2):
            table[x, y, z, s] = collapse / 4
    return LabeledDistribution(("x", "y", "z", "s"), table)


# the run-type names begin with "test", which pytest would otherwise collect
test_b1_distribution.__test__ = False
test_b2_distribution.__test__ = False
test_both_distribution.__test__ = False


def closed_form_P(lam: float, delta: float, i: int, j: int, k: int) -> float:
    """Closed-form key-run flip table for independent depolarizing noise on both legs.

    Entry (i, j, k) is the probability that the receiver's decoded bits are
    (x xor i, y xor j, z xor k); a and b below are the two-pass effective
    depolarizing weights lam*(2-lam) and delta*(2-delta).
    """
    for name, v in (("lambda", lam), ("delta", delta)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    a = lam * (2 - lam)
    b = delta * (2 - delta)
    entries = {
        (0, 0, 0): 1 + 5 / 8 * a * b - 3 / 4 * (a + b),
        (0, 0, 1): 1 / 8 * (2 - a) * b,
        (0, 1, 0): 1 / 4 * (a + b) - 3 / 8 * a * b,
        (0, 1, 1): 1 / 8 * (2 - a) * b,
        (1, 0, 0): 1 / 8 * (2 - b) * a,
        (1, 0, 1): 1 / 8 * a * b,
        (1, 1, 0): 1 / 8 * (2 - b) * a,
        (1, 1, 1): 1 / 8 * a * b,
    }
    return entries[(i & 1, j & 1, k & 1)]


def closed_form_Q(lam: float, i: int, j: int) -> float:
    """Closed-form test-run flip table for sender 1 under independent depolarizing noise."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    entries = {
        (0, 0): (2 - lam) ** 2 / 4,
        (0, 1): lam * (2 - lam) / 4,
        (1, 0): lam * (2 - lam) / 4,
        (1, 1): lam**2 / 4,
    }
    return entries[(i & 1, j & 1)]


def closed_form_qtilde(delta: float, flip: int) -> float:
    """Closed-form test-run flip probability for sender 2: 1 - delta/2 or delta/2."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    return 1 - delta / 2 if (flip & 1) == 0 else delta / 2
