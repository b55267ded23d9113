"""Kraus-operator noise models and forward/backward transmission scenarios.

A scenario bundles one two-qubit channel for the outbound legs (acting on
the wires travelling to the two senders) and one for the return legs. The
one-sided depolarizing variants are separate named models because they are
compared against each other as an experiment in their own right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ID2, PAULI_X, PAULI_Y, PAULI_Z, dagger, tensor

COMPLETENESS_TOL = 1e-12

MODEL_PARAMS = {
    "identity": (),
    "depol-indep": ("lam", "delta"),
    "depol-forward-only": ("lam", "delta"),
    "depol-backward-only": ("lam", "delta"),
    "depol-corr": ("lam_f", "lam_b"),
    "ampdamp-indep": ("gamma1", "gamma2"),
}


@dataclass(frozen=True)
class KrausSet:
    """Operator-sum representation of a CPTP channel, completeness-checked."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(op, dtype=complex) for op in self.operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(op.shape != (d, d) for op in ops):
            raise ValueError("Kraus operators must share one square dimension")
        comp = sum(dagger(op) @ op for op in ops)
        defect = np.abs(comp - np.eye(d)).max()
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"sum K^dag K deviates from identity by {defect}")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def apply(self, mat: np.ndarray) -> np.ndarray:
        return sum(op @ mat @ dagger(op) for op in self.operators)


def identity_channel(num_qubits: int = 1) -> KrausSet:
    return KrausSet((np.eye(2**num_qubits, dtype=complex),))


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def depolarizing(lam: float) -> KrausSet:
    """Single-qubit depolarizing channel with Kraus weights (1-3*lam/4, lam/4, lam/4, lam/4)."""
    lam = _check_unit_interval("lambda", lam)
    return KrausSet(
        (
            np.sqrt(1 - 3 * lam / 4) * ID2,
            np.sqrt(lam / 4) * PAULI_X,
            np.sqrt(lam / 4) * PAULI_Y,
            np.sqrt(lam / 4) * PAULI_Z,
        )
    )


def amplitude_damping(gamma: float) -> KrausSet:
    """Single-qubit amplitude damping toward |0> with decay probability gamma."""
    gamma = _check_unit_interval("gamma", gamma)
    a0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    a1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausSet((a0, a1))


def correlated_depolarizing(lam: float) -> KrausSet:
    """Two-qubit fully correlated Pauli channel: both wires suffer the same Pauli."""
    lam = _check_unit_interval("lambda", lam)
    return KrausSet(
        (
            np.sqrt(1 - 3 * lam / 4) * np.eye(4, dtype=complex),
            np.sqrt(lam / 4) * tensor(PAULI_X, PAULI_X),
            np.sqrt(lam / 4) * tensor(PAULI_Y, PAULI_Y),
            np.sqrt(lam / 4) * tensor(PAULI_Z, PAULI_Z),
        )
    )


def product2(c1: KrausSet, c2: KrausSet) -> KrausSet:
    """Two independent single-qubit channels acting as one two-qubit channel."""
    if c1.dim != 2 or c2.dim != 2:
        raise ValueError("product2 expects two single-qubit channels")
    return KrausSet(tuple(tensor(a, b) for a in c1.operators for b in c2.operators))


@dataclass(frozen=True)
class NoiseScenario:
    """Forward and backward two-qubit channels plus the parameter record."""

    forward: KrausSet
    backward: KrausSet
    descriptor: tuple

    def __post_init__(self):
        if self.forward.dim != 4 or self.backward.dim != 4:
            raise ValueError("scenario channels must act on two qubits")

    @property
    def model(self) -> str:
        return self.descriptor[0]

    @property
    def params(self) -> dict:
        return dict(self.descriptor[1])

    def describe(self) -> str:
        parts = [self.model] + [f"{k}={v:g}" for k, v in self.descriptor[1]]
        return " ".join(parts)


def make_scenario(model: str, **params: float) -> NoiseScenario:
    """Build a named noise scenario.

    Models and parameters:
      identity
      depol-indep(lam, delta)         independent depolarizing, both directions
      depol-forward-only(lam, delta)  same forward channel, noiseless return
      depol-backward-only(lam, delta) noiseless outbound, same return channel
      depol-corr(lam_f, lam_b)        correlated Pauli noise, per direction
      ampdamp-indep(gamma1, gamma2)   independent amplitude damping, both directions
    """
    if model not in MODEL_PARAMS:
        raise ValueError(f"unknown noise model {model!r}; known: {sorted(MODEL_PARAMS)}")
    expected = MODEL_PARAMS[model]
    missing = [p for p in expected if p not in params]
    extra = [p for p in params if p not in expected]
    if missing or extra:
        raise ValueError(
            f"model {model!r} takes parameters {expected}; missing {missing}, unexpected {extra}"
        )
    ident = identity_channel(2)
    if model == "identity":
        forward = backward = ident
    elif model in ("depol-indep", "depol-forward-only", "depol-backward-only"):
        pair = product2(depolarizing(params["lam"]), depolarizing(params["delta"]))
        forward = pair if model != "depol-backward-only" else ident
        backward = pair if model != "depol-forward-only" else ident
    elif model == "depol-corr":
        forward = correlated_depolarizing(params["lam_f"])
        backward = correlated_depolarizing(params["lam_b"])
    else:
        pair = product2(amplitude_damping(params["gamma1"]), amplitude_damping(params["gamma2"]))
        forward = backward = pair
    descriptor = (model, tuple((k, float(params[k])) for k in expected))
    return NoiseScenario(forward, backward, descriptor)
