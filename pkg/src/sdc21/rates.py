"""Entropy calculus, measurement-overlap constants and key-rate lower bounds.

The two bounds evaluated here are

    r1 >= 2 - avg_(z,s) H(test1_A | test1_B) - sum-over-s/2 of the two key terms
    r2 >= 1 - avg_(x,y,s) H(test2_A | test2_B) - the same key terms

where the leading constants are log2(1/c) for the overlap c between the
receiver's key and test measurement families (1/4 toward sender 1, 1/2
toward sender 2), the test terms are plug-in conditional Shannon entropies
of the test-run distributions conditioned on the disclosed bits, and the
key terms are H(decoded | encoded) for each sender conditioned on the
announced auxiliary bit. A negative bound means the protocol aborts; the
raw value is reported either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from .channels import NoiseScenario
from .linalg import DensityOp, hermitian_eigenvalues, psd_sqrt
from .protocol import (
    LabeledDistribution,
    keygen_distribution,
    test_b1_distribution,
    test_b2_distribution,
)
from .states import alice_key_family, alice_test_family_b1, alice_test_family_b2

ENTROPY_FLOOR = 1e-12

KEYGEN_GROUPS = {"A1": ("i", "j"), "B1": ("x", "y"), "A2": ("k",), "B2": ("z",)}


def _entropy_of_table(table: np.ndarray) -> float:
    p = np.asarray(table, dtype=float).ravel()
    p = p[p > ENTROPY_FLOOR]
    return float(-(p * np.log2(p)).sum()) if p.size else 0.0


def shannon_entropy(d: LabeledDistribution, names) -> float:
    """Shannon entropy in bits of the marginal on the named variables."""
    names = tuple(names)
    if not names:
        raise ValueError("entropy needs a nonempty variable subset")
    return _entropy_of_table(d.marginal(names).table)


def conditional_entropy(d: LabeledDistribution, target, given) -> float:
    """H(target | given) = H(target, given) - H(given), in bits."""
    target, given = tuple(target), tuple(given)
    if set(target) & set(given):
        raise ValueError(f"target {target} and given {given} overlap")
    return shannon_entropy(d, target + given) - shannon_entropy(d, given)


def mutual_information(d: LabeledDistribution, a, b) -> float:
    """I(a : b) = H(a) + H(b) - H(a, b), in bits."""
    a, b = tuple(a), tuple(b)
    if set(a) & set(b):
        raise ValueError(f"subsets {a} and {b} overlap")
    return shannon_entropy(d, a) + shannon_entropy(d, b) - shannon_entropy(d, a + b)


def von_neumann_entropy(rho: DensityOp) -> float:
    """-tr(rho log2 rho) in bits, eigenvalues below 1e-12 contributing zero."""
    eigs = hermitian_eigenvalues(rho.mat).real
    eigs = eigs[eigs > ENTROPY_FLOOR]
    return float(-(eigs * np.log2(eigs)).sum()) if eigs.size else 0.0


def _overlap_sq(p: np.ndarray, q: np.ndarray) -> float:
    """||sqrt(p) sqrt(q)||_inf^2 for PSD p, q: top eigenvalue of sqrt(q) p sqrt(q)."""
    sp, sq = psd_sqrt(p), psd_sqrt(q)
    m = sp @ sq
    return float(hermitian_eigenvalues(m.conj().T @ m)[0])


def overlap_c() -> float:
    """Overlap between the receiver's rank-2 key family and her sender-1 test family."""
    test = alice_test_family_b1()
    best = 0.0
    for s in (0, 1):
        key = alice_key_family(s, rank=2)
        for _, kp in key.projectors:
            for _, tp in test.projectors:
                best = max(best, _overlap_sq(kp, tp))
    return best


def overlap_ctilde() -> float:
    """Overlap between the receiver's rank-4 key family and her sender-2 test family."""
    best = 0.0
    for s in (0, 1):
        key = alice_key_family(s, rank=4)
        test = alice_test_family_b2(s)
        for _, kp in key.projectors:
            for _, tp in test.projectors:
                best = max(best, _overlap_sq(kp, tp))
    return best


@dataclass(frozen=True)
class RatePoint:
    """Key-rate bounds and their entropy ingredients for one noise scenario.

    h_test_b1 and h_test_b2 are the averaged test-run conditional entropies
    (weights 1/4 over (z, s) and 1/8 over (x, y, s)); h_key_b1 and h_key_b2
    average H(decoded | encoded) over the announced bit. The abort flags
    implement the sign criterion on the raw bounds.
    """

    descriptor: tuple
    r1_lower: float
    r2_lower: float
    h_test_b1: float
    h_test_b2: float
    h_key_b1: float
    h_key_b2: float

    def __post_init__(self):
        if self.r1_lower > 2 + 1e-9 or self.r2_lower > 1 + 1e-9:
            raise ValueError("key-rate bound exceeds its information-theoretic cap")
        for term in (self.h_test_b1, self.h_test_b2, self.h_key_b1, self.h_key_b2):
            if term < -1e-9:
                raise ValueError(f"negative entropy term {term}")

    @property
    def abort_p1(self) -> bool:
        return self.r1_lower < 0

    @property
    def abort_p2(self) -> bool:
        return self.r2_lower < 0


def _key_terms(keygen: LabeledDistribution) -> tuple:
    """Per-s averages of H(ij|xy) and H(k|z) over the key-run distribution."""
    hk1 = hk2 = 0.0
    for s in (0, 1):
        cond = keygen.condition(s=s)
        if cond is None:
            continue
        hk1 += 0.5 * conditional_entropy(cond, ("i", "j"), ("x", "y"))
        hk2 += 0.5 * conditional_entropy(cond, ("k",), ("z",))
    return hk1, hk2


def _test_term_b1(tb1: LabeledDistribution) -> float:
    total = 0.0
    for z, s in product((0, 1), repeat=2):
        cond = tb1.condition(z=z, s=s)
        if cond is None:
            continue
        total += 0.25 * conditional_entropy(cond, ("i", "j"), ("x", "y"))
    return total


def _test_term_b2(tb2: LabeledDistribution) -> float:
    total = 0.0
    for x, y, s in product((0, 1), repeat=3):
        cond = tb2.condition(x=x, y=y, s=s)
        if cond is None:
            continue
        total += 0.125 * conditional_entropy(cond, ("k",), ("z",))
    return total


def evaluate_rates(scenario: NoiseScenario) -> RatePoint:
    """Evaluate both key-rate lower bounds from the exact run distributions."""
    hk1, hk2 = _key_terms(keygen_distribution(scenario))
    ht1 = _test_term_b1(test_b1_distribution(scenario))
    ht2 = _test_term_b2(test_b2_distribution(scenario))
    r1 = 2.0 - ht1 - (hk1 + hk2)
    r2 = 1.0 - ht2 - (hk1 + hk2)
    return RatePoint(scenario.descriptor, r1, r2, ht1, ht2, hk1, hk2)


def key_rate_p1(scenario: NoiseScenario) -> float:
    """Lower bound on the key rate between the receiver and sender 1, bits per run."""
    return evaluate_rates(scenario).r1_lower


def key_rate_p2(scenario: NoiseScenario) -> float:
    """Lower bound on the key rate between the receiver and sender 2, bits per run."""
    return evaluate_rates(scenario).r2_lower


def theorem1_bounds(
    i_a1b1: float,
    i_a1e_given_b2: float,
    i_a2b2: float,
    i_a2e_given_b1: float,
    d1: float,
    d2: float,
    d3: float,
) -> tuple:
    """The two abstract rate bounds of the security statement.

    r1 <= I(A1:B1) - I(A1:E|B2) - d1 - 2*d2 - d3
    r2 <= I(A2:B2) - I(A2:E|B1) - 2*d1 - d2 - d3
    """
    values = (i_a1b1, i_a1e_given_b2, i_a2b2, i_a2e_given_b1, d1, d2, d3)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("all inputs must be finite")
    if min(d1, d2, d3) < 0:
        raise ValueError("slack parameters d1, d2, d3 must be nonnegative")
    r1 = i_a1b1 - i_a1e_given_b2 - d1 - 2 * d2 - d3
    r2 = i_a2b2 - i_a2e_given_b1 - 2 * d1 - d2 - d3
    return r1, r2


@dataclass(frozen=True)
class LemmaReport:
    """Worst slack over the monogamy and chain inequalities (negative = violated)."""

    min_slack: float
    checks: int
    worst_case: str

    @property
    def holds(self) -> bool:
        return self.min_slack >= -1e-9


def check_lemma_inequalities(d: LabeledDistribution, groups: dict | None = None) -> LemmaReport:
    """Verify the information-theoretic lemmas behind the rate bounds on ``d``.

    ``groups`` maps the four register names A1, B1, A2, B2 to variable
    tuples of ``d`` (defaults to the key-run naming). Checks, with slacks
    slack = rhs - lhs:

      chain inequality   I(S:T) + I(T:U) <= I(S:U) + I(T:SU)
                         over all ordered triples of distinct groups;
      monogamy           I(A1:A2 B2) <= d1 + d2 + d3 and
                         I(A1 B1:A2) <= d1 + d2 + d3,
                         with d1 = H(A1) - I(A1:B1), d2 = H(A2) - I(A2:B2),
                         d3 = I(B1:B2).
    """
    groups = dict(KEYGEN_GROUPS if groups is None else groups)
    missing = [g for g in ("A1", "B1", "A2", "B2") if g not in groups]
    if missing:
        raise ValueError(f"missing variable groups {missing}")
    g = {k: tuple(v) for k, v in groups.items()}

    min_slack, worst, checks = math.inf, "", 0

    def record(slack: float, label: str):
        nonlocal min_slack, worst, checks
        checks += 1
        if slack < min_slack:
            min_slack, worst = slack, label

    for names in permutations(("A1", "B1", "A2", "B2"), 3):
        s_v, t_v, u_v = (g[n] for n in names)
        lhs = mutual_information(d, s_v, t_v) + mutual_information(d, t_v, u_v)
        rhs = mutual_information(d, s_v, u_v) + mutual_information(d, t_v, s_v + u_v)
        record(rhs - lhs, "chain " + ":".join(names))

    d1 = shannon_entropy(d, g["A1"]) - mutual_information(d, g["A1"], g["B1"])
    d2 = shannon_entropy(d, g["A2"]) - mutual_information(d, g["A2"], g["B2"])
    d3 = mutual_information(d, g["B1"], g["B2"])
    budget = d1 + d2 + d3
    record(budget - mutual_information(d, g["A1"], g["A2"] + g["B2"]), "monogamy A1:A2B2")
    record(budget - mutual_information(d, g["A1"] + g["B1"], g["A2"]), "monogamy A1B1:A2")

    return LemmaReport(float(min_slack), checks, worst)
