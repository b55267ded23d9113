"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines.
"""

import math
import time
from itertools import product

import numpy as np
import pytest

from sdc21.channels import MODEL_PARAMS, make_scenario
from sdc21.linalg import dagger, embed_on_wires, tensor
from sdc21.postprocess import estimate_and_decide, privacy_amplify, reconcile, sample_runs
from sdc21.protocol import (
    closed_form_P,
    closed_form_Q,
    closed_form_qtilde,
    keygen_distribution,
    test_b1_distribution,
    test_b2_distribution,
)
from sdc21.purification import (
    verify_encoding_purification,
    verify_mixed_purifications,
    verify_uniform_outcome_probability,
)
from sdc21.rates import (
    check_lemma_inequalities,
    evaluate_rates,
    mutual_information,
    overlap_c,
    overlap_ctilde,
)
from sdc21.states import encoding_unitary, g_state, ghz3
from sdc21.channels import depolarizing


def report(number: int, title: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} [{status}] {title}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number}: {title} ({detail})"


def test_criterion_1_zero_noise_capacities():
    start = time.monotonic()
    rp = evaluate_rates(make_scenario("identity"))
    elapsed = time.monotonic() - start
    ok = (
        abs(rp.r1_lower - 2.0) <= 1e-9
        and abs(rp.r2_lower - 1.0) <= 1e-9
        and abs(rp.r1_lower + rp.r2_lower - 3.0) <= 1e-9
        and elapsed < 1.0
    )
    report(1, "zero-noise capacities r1=2, r2=1, sum=3", ok,
           f"r1={rp.r1_lower:.12f}, r2={rp.r2_lower:.12f}, runtime {elapsed:.2f}s")


def test_criterion_2_closed_form_oracle_equivalence():
    start = time.monotonic()
    grid = [round(0.1 * t, 1) for t in range(11)]
    worst = 0.0
    for lam, delta in product(grid, grid):
        sc = make_scenario("depol-indep", lam=lam, delta=delta)
        kd = keygen_distribution(sc)
        tb1 = test_b1_distribution(sc)
        tb2 = test_b2_distribution(sc)
        for x, y, z, s in product((0, 1), repeat=4):
            ck = kd.condition(x=x, y=y, z=z, s=s)
            c1 = tb1.condition(x=x, y=y, z=z, s=s)
            c2 = tb2.condition(x=x, y=y, z=z, s=s)
            for i, j, k in product((0, 1), repeat=3):
                worst = max(worst, abs(ck.table[i, j, k] - closed_form_P(lam, delta, i ^ x, j ^ y, k ^ z)))
            for i, j in product((0, 1), repeat=2):
                worst = max(worst, abs(c1.table[i, j] - closed_form_Q(lam, i ^ x, j ^ y)))
            for k in (0, 1):
                worst = max(worst, abs(c2.table[k] - closed_form_qtilde(delta, k ^ z)))
    elapsed = time.monotonic() - start
    report(2, "11x11 grid matches closed-form key/test tables within 1e-10",
           worst <= 1e-10 and elapsed < 120, f"max defect {worst:.2e}, {elapsed:.1f}s")


def test_criterion_3_uniform_outcome_marginal():
    rng = np.random.default_rng(321)
    worst = 0.0
    for model, names in MODEL_PARAMS.items():
        params = {name: float(rng.uniform(0, 1)) for name in names}
        worst = max(worst, verify_uniform_outcome_probability(make_scenario(model, **params)))
    report(3, "key-run marginal p(x,y;z,s) = 1/16 across all scenario families",
           worst <= 1e-10, f"max deviation {worst:.2e}")


def test_criterion_4_overlap_constants():
    c, ct = overlap_c(), overlap_ctilde()
    report(4, "measurement overlaps c = 1/4 and c~ = 1/2",
           abs(c - 0.25) <= 1e-9 and abs(ct - 0.5) <= 1e-9, f"c={c:.12f}, c~={ct:.12f}")


def test_criterion_5_purification_identities():
    scenarios = (
        make_scenario("identity"),
        make_scenario("depol-indep", lam=0.3, delta=0.6),
        make_scenario("depol-corr", lam_f=0.5, lam_b=0.5),
        make_scenario("ampdamp-indep", gamma1=0.5, gamma2=0.5),
    )
    worst = max(
        max(verify_encoding_purification(sc), verify_mixed_purifications(sc))
        for sc in scenarios
    )
    report(5, "encoding and mixed-run purification identities within 1e-10",
           worst <= 1e-10, f"max discrepancy {worst:.2e}")


def test_criterion_6_correlated_swap_symmetry():
    axis = np.linspace(0.0, 1.0, 6)
    rates = {}
    for a, b in product(axis, axis):
        rates[(a, b)] = evaluate_rates(make_scenario("depol-corr", lam_f=float(a), lam_b=float(b))).r1_lower
    worst = max(abs(rates[(a, b)] - rates[(b, a)]) for a, b in rates)
    report(6, "r1 symmetric under forward/backward swap on 6x6 grid",
           worst <= 1e-9, f"max asymmetry {worst:.2e}")


def test_criterion_7_one_sided_noise():
    axis = np.linspace(0.0, 1.0, 6)
    worst_r1 = 0.0
    ordered = True
    detail = ""
    for lam, delta in product(axis, axis):
        fwd = evaluate_rates(make_scenario("depol-forward-only", lam=float(lam), delta=float(delta)))
        back = evaluate_rates(make_scenario("depol-backward-only", lam=float(lam), delta=float(delta)))
        worst_r1 = max(worst_r1, abs(fwd.r1_lower - back.r1_lower))
        if back.r2_lower > fwd.r2_lower + 1e-9:
            ordered = False
            detail = f"violation at ({lam:.1f},{delta:.1f})"
    report(7, "one-sided noise: r1 equal, r2 backward <= forward on 6x6 grid",
           worst_r1 <= 1e-9 and ordered, detail or f"max r1 gap {worst_r1:.2e}")


def test_criterion_8_basis_and_unitary_algebra():
    worst = 0.0
    for s in (0, 1):
        vecs = [g_state(s, i, j, k).amps for i, j, k in product((0, 1), repeat=3)]
        gram = np.array([[u.conj() @ v for v in vecs] for u in vecs])
        worst = max(worst, float(np.abs(gram - np.eye(8)).max()))
        resolution = sum(np.outer(v, v.conj()) for v in vecs)
        worst = max(worst, float(np.abs(resolution - np.eye(8)).max()))
    for s, x, y, z in product((0, 1), repeat=4):
        u = embed_on_wires(tensor(encoding_unitary(x, y), encoding_unitary(z, s)), (1, 2), 3)
        amp = g_state(s, x, y, z).amps.conj() @ (u @ ghz3().amps)
        worst = max(worst, abs(abs(amp) ** 2 - 1.0))
    unitaries = [encoding_unitary(x, y) for x, y in product((0, 1), repeat=2)]
    for a, ua in enumerate(unitaries):
        for b, ub in enumerate(unitaries):
            tr = np.trace(ua @ dagger(ub))
            worst = max(worst, abs(tr - (2.0 if a == b else 0.0)))
    rng = np.random.default_rng(5)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ dagger(m)
    rho /= np.trace(rho).real
    ch = depolarizing(0.63)
    for u in unitaries:
        gap = np.abs(ch.apply(u @ rho @ dagger(u)) - u @ ch.apply(rho) @ dagger(u)).max()
        worst = max(worst, float(gap))
    report(8, "basis completeness, decoding tables, unitary orthogonality, covariance",
           worst <= 1e-12, f"max defect {worst:.2e}")


def test_criterion_9_lemma_fuzzing():
    from sdc21.protocol import LabeledDistribution

    rng = np.random.default_rng(99)
    worst = math.inf
    for _ in range(100):
        table = rng.random((2, 2, 2))
        d = LabeledDistribution(("S", "T", "U"), table / table.sum())
        lhs = mutual_information(d, ("S",), ("T",)) + mutual_information(d, ("T",), ("U",))
        rhs = mutual_information(d, ("S",), ("U",)) + mutual_information(d, ("T",), ("S", "U"))
        worst = min(worst, rhs - lhs)
    for sc in (
        make_scenario("identity"),
        make_scenario("depol-indep", lam=0.5, delta=0.3),
        make_scenario("depol-corr", lam_f=0.7, lam_b=0.2),
        make_scenario("ampdamp-indep", gamma1=0.45, gamma2=0.8),
    ):
        worst = min(worst, check_lemma_inequalities(keygen_distribution(sc)).min_slack)
    report(9, "chain/monogamy inequalities on 100 random + protocol distributions",
           worst >= -1e-9, f"min slack {worst:.2e}")


def test_criterion_10_finite_key_convergence():
    start = time.monotonic()
    worst = 0.0
    for lam in (0.0, 0.1, 0.2):
        for delta in (0.0, 0.1, 0.2):
            sc = make_scenario("depol-indep", lam=lam, delta=delta)
            est = estimate_and_decide(sample_runs(sc, 100_000, 0.25, seed=4242))
            rp = evaluate_rates(sc)
            worst = max(worst, abs(est.r1_est - rp.r1_lower), abs(est.r2_est - rp.r2_lower))
    ses = sample_runs(make_scenario("identity"), 10_000, 0.1, seed=4243)
    est = estimate_and_decide(ses)
    rec = reconcile(ses, margin_bits=0, seed=4244)
    keys_match = np.array_equal(rec.pair_b1.alice_key, rec.pair_b1.bob_key) and np.array_equal(
        rec.pair_b2.alice_key, rec.pair_b2.bob_key
    )
    nkey = int(ses.mask_key().sum())
    k1 = privacy_amplify(rec.pair_b1.bob_key, int(nkey * est.r1_est), seed=4245)
    k2 = privacy_amplify(rec.pair_b2.bob_key, int(nkey * est.r2_est), seed=4246)
    m = min(k1.size, k2.size)
    counts = np.zeros((2, 2))
    for a, b in zip(k1[:m], k2[:m]):
        counts[a, b] += 1
    p = counts / counts.sum()
    pa, pb = p.sum(axis=1), p.sum(axis=0)
    cross_mi = sum(
        p[a, b] * math.log2(p[a, b] / (pa[a] * pb[b]))
        for a in (0, 1)
        for b in (0, 1)
        if p[a, b] > 0
    )
    elapsed = time.monotonic() - start
    ok = worst <= 0.02 and keys_match and cross_mi <= 0.01 and elapsed < 300
    report(10, "finite-key estimates within 0.02 at n=1e5; end-to-end keys match, cross-MI <= 0.01",
           ok, f"max est error {worst:.4f}, cross MI {cross_mi:.4f}, {elapsed:.0f}s")
