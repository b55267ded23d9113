"""Command-line front end: verify, rate, sweep, finite-key.

Numeric output uses 12 significant digits with '.' as the decimal
separator; `rate` and `finite-key` print line-oriented key=value records so
runs can be diffed. Exit codes: 0 success (a protocol abort is a protocol
outcome, not a failure), 1 verification failure, 2 usage error.

Every flag can also be given in an INI-style config file of key=value
lines (keys are the long flag names without the dashes); flags override
the file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
from itertools import product

import numpy as np

from .channels import MODEL_PARAMS, NoiseScenario, make_scenario
from .postprocess import estimate_and_decide, privacy_amplify, reconcile, sample_runs
from .protocol import (
    closed_form_P,
    closed_form_Q,
    closed_form_qtilde,
    keygen_distribution,
    test_b1_distribution,
    test_b2_distribution,
)
from .purification import (
    verify_backward_commutation,
    verify_encoding_purification,
    verify_mixed_purifications,
    verify_uniform_outcome_probability,
)
from .rates import check_lemma_inequalities, evaluate_rates, overlap_c, overlap_ctilde
from .states import encoding_unitary, g_state, ghz3
from .linalg import ID2, PAULI_X, PAULI_Y, PAULI_Z, apply_kraus, dagger, embed_on_wires

FLOAT_FMT = ".12g"

# maps CLI flag names to make_scenario parameter names
_FLAG_TO_PARAM = {
    "lambda": "lam",
    "delta": "delta",
    "lambda-f": "lam_f",
    "lambda-b": "lam_b",
    "gamma1": "gamma1",
    "gamma2": "gamma2",
}


_PARAM_TO_FLAG = {v: k for k, v in _FLAG_TO_PARAM.items()}


def _fmt(value: float) -> str:
    return format(float(value), FLOAT_FMT)


def _scenario_from_args(args) -> NoiseScenario:
    if args.model is None:
        raise ValueError("--model is required")
    params = {}
    for flag, param in _FLAG_TO_PARAM.items():
        value = getattr(args, flag.replace("-", "_"), None)
        if value is not None:
            params[param] = value
    return make_scenario(args.model, **params)


# ---------------------------------------------------------------------------
# verify

_PURIFICATION_SCENARIOS = (
    ("identity", {}),
    ("depol-indep", {"lam": 0.3, "delta": 0.6}),
    ("depol-corr", {"lam_f": 0.5, "lam_b": 0.5}),
    ("ampdamp-indep", {"gamma1": 0.5, "gamma2": 0.5}),
    ("depol-backward-only", {"lam": 0.4, "delta": 0.7}),
)


def _randomized_scenarios(seed: int):
    """One scenario per model family with parameters drawn uniformly from [0, 1]."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    out = []
    for model, names in MODEL_PARAMS.items():
        params = {name: float(rng.uniform(0.0, 1.0)) for name in names}
        out.append(make_scenario(model, **params))
    return out


def _check_kraus_completeness() -> tuple:
    worst = 0.0
    for model, params in _PURIFICATION_SCENARIOS:
        sc = make_scenario(model, **params)
        for ch in (sc.forward, sc.backward):
            comp = sum(dagger(op) @ op for op in ch.operators)
            worst = max(worst, float(np.abs(comp - np.eye(ch.dim)).max()))
    return worst <= 1e-12, f"max |sum K^H K - I| = {worst:.3e}"


def _check_basis() -> tuple:
    worst = 0.0
    for s in (0, 1):
        vecs = [g_state(s, i, j, k).amps for i, j, k in product((0, 1), repeat=3)]
        gram = np.array([[u.conj() @ v for v in vecs] for u in vecs])
        worst = max(worst, float(np.abs(gram - np.eye(8)).max()))
    return worst <= 1e-12, f"Gram defect {worst:.3e}"


def _check_decoding_tables() -> tuple:
    worst = 1.0
    for s, x, y, z in product((0, 1), repeat=4):
        u = embed_on_wires(np.kron(encoding_unitary(x, y), encoding_unitary(z, s)), (1, 2), 3)
        amp = g_state(s, x, y, z).amps.conj() @ (u @ ghz3().amps)
        worst = min(worst, abs(amp) ** 2)
    return worst >= 1 - 1e-12, f"min decode fidelity {worst:.12f}"


def _check_orthogonal_unitaries() -> tuple:
    ops = [ID2, PAULI_X, PAULI_Y, PAULI_Z]
    worst = 0.0
    for a in range(4):
        for b in range(4):
            tr = np.trace(ops[a] @ dagger(ops[b]))
            worst = max(worst, abs(tr - (2.0 if a == b else 0.0)))
    return worst <= 1e-12, f"max |tr(W_a W_b^H) - 2 delta_ab| = {worst:.3e}"


def _check_depolarizing_covariance() -> tuple:
    from .channels import depolarizing

    ch = depolarizing(0.37)
    rng = np.random.Generator(np.random.Philox(key=11))
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ dagger(m)
    rho /= np.trace(rho).real
    worst = 0.0
    for x, y in product((0, 1), repeat=2):
        u = encoding_unitary(x, y)
        lhs = apply_kraus(ch, u @ rho @ dagger(u))
        rhs = u @ apply_kraus(ch, rho) @ dagger(u)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst <= 1e-12, f"max commutator defect {worst:.3e}"


def _check_purification(kind: str) -> tuple:
    fn = {
        "encoding": verify_encoding_purification,
        "mixed": verify_mixed_purifications,
        "backward": verify_backward_commutation,
    }[kind]
    worst = 0.0
    for model, params in _PURIFICATION_SCENARIOS:
        worst = max(worst, fn(make_scenario(model, **params)))
    tol = 1e-10 if kind != "backward" else 1e-12
    return worst <= tol, f"max discrepancy {worst:.3e}"


def _check_uniform_marginal(seed: int) -> tuple:
    worst = max(verify_uniform_outcome_probability(sc) for sc in _randomized_scenarios(seed))
    return worst <= 1e-10, f"max |p(xyzs) - 1/16| = {worst:.3e}"


def _check_overlaps() -> tuple:
    c, ct = overlap_c(), overlap_ctilde()
    ok = abs(c - 0.25) <= 1e-9 and abs(ct - 0.5) <= 1e-9
    return ok, f"c = {c:.12f}, c~ = {ct:.12f}"


def _closed_form_grid_defects() -> tuple:
    """Worst |simulated - closed form| over the 11x11 grid, per table."""
    grid = [round(0.1 * t, 1) for t in range(11)]
    worst_p = worst_q = worst_qt = 0.0
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
                worst_p = max(worst_p, abs(ck.table[i, j, k] - closed_form_P(lam, delta, i ^ x, j ^ y, k ^ z)))
            for i, j in product((0, 1), repeat=2):
                worst_q = max(worst_q, abs(c1.table[i, j] - closed_form_Q(lam, i ^ x, j ^ y)))
            for k in (0, 1):
                worst_qt = max(worst_qt, abs(c2.table[k] - closed_form_qtilde(delta, k ^ z)))
    return worst_p, worst_q, worst_qt


def _check_lemmas(seed: int) -> tuple:
    worst = np.inf
    for sc in _randomized_scenarios(seed):
        rep = check_lemma_inequalities(keygen_distribution(sc))
        worst = min(worst, rep.min_slack)
    rng = np.random.Generator(np.random.Philox(key=seed + 1))
    from .protocol import LabeledDistribution
    from .rates import mutual_information

    for _ in range(100):
        table = rng.random((2, 2, 2))
        d = LabeledDistribution(("S", "T", "U"), table / table.sum())
        lhs = mutual_information(d, ("S",), ("T",)) + mutual_information(d, ("T",), ("U",))
        rhs = mutual_information(d, ("S",), ("U",)) + mutual_information(d, ("T",), ("S", "U"))
        worst = min(worst, rhs - lhs)
    return worst >= -1e-9, f"min slack {worst:.3e}"


def _check_zero_noise_rates() -> tuple:
    rp = evaluate_rates(make_scenario("identity"))
    ok = abs(rp.r1_lower - 2) <= 1e-9 and abs(rp.r2_lower - 1) <= 1e-9
    return ok, f"r1 = {rp.r1_lower:.12f}, r2 = {rp.r2_lower:.12f}"


def verification_checks(seed: int = 2024):
    """The named checks run by `verify`, as (name, zero-argument callable) pairs."""
    p_defect, q_defect, qt_defect = [None], [None], [None]

    def closed_forms():
        p_defect[0], q_defect[0], qt_defect[0] = _closed_form_grid_defects()

    def check_p():
        if p_defect[0] is None:
            closed_forms()
        return p_defect[0] <= 1e-10, f"max defect {p_defect[0]:.3e}"

    def check_q():
        if q_defect[0] is None:
            closed_forms()
        return q_defect[0] <= 1e-10, f"max defect {q_defect[0]:.3e}"

    def check_qt():
        if qt_defect[0] is None:
            closed_forms()
        return qt_defect[0] <= 1e-10, f"max defect {qt_defect[0]:.3e}"

    return (
        ("kraus-completeness", _check_kraus_completeness),
        ("basis-orthonormality", _check_basis),
        ("decoding-tables", _check_decoding_tables),
        ("orthogonal-unitaries", _check_orthogonal_unitaries),
        ("depolarizing-covariance", _check_depolarizing_covariance),
        ("purification-encoding", lambda: _check_purification("encoding")),
        ("purification-mixed-runs", lambda: _check_purification("mixed")),
        ("purification-backward-commutation", lambda: _check_purification("backward")),
        ("uniform-outcome-marginal", lambda: _check_uniform_marginal(seed)),
        ("overlap-constants", _check_overlaps),
        ("closed-form-key-table", check_p),
        ("closed-form-test1-table", check_q),
        ("closed-form-test2-table", check_qt),
        ("lemma-inequalities", lambda: _check_lemmas(seed)),
        ("zero-noise-rates", _check_zero_noise_rates),
    )


def cmd_verify(args, checks=None) -> int:
    checks = verification_checks(args.seed if args.seed is not None else 2024) if checks is None else checks
    failed = []
    for name, fn in checks:
        ok, detail = fn()
        print(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}")
        if not ok:
            failed.append(name)
    if failed:
        print(f"verification FAILED at: {failed[0]}")
        return 1
    print(f"all {len(checks)} checks passed")
    return 0


# ---------------------------------------------------------------------------
# rate

def cmd_rate(args) -> int:
    scenario = _scenario_from_args(args)
    rp = evaluate_rates(scenario)
    print(f"model={scenario.model}")
    for key, value in scenario.descriptor[1]:
        print(f"{_PARAM_TO_FLAG.get(key, key)}={_fmt(value)}")
    for key in ("r1_lower", "r2_lower", "h_test_b1", "h_test_b2", "h_key_b1", "h_key_b2"):
        print(f"{key}={_fmt(getattr(rp, key))}")
    print(f"abort_p1={'true' if rp.abort_p1 else 'false'}")
    print(f"abort_p2={'true' if rp.abort_p2 else 'false'}")
    return 0


# ---------------------------------------------------------------------------
# sweep

def _axis_pair(value, name: str) -> tuple:
    parts = str(value).split(",")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ValueError(f"--{name} takes one value or two comma-separated values")
    return float(parts[0]), float(parts[1])


def _sweep_point(task: tuple) -> tuple:
    model, name1, name2, p1, p2 = task
    rp = evaluate_rates(make_scenario(model, **{name1: p1, name2: p2}))
    return (p1, p2, rp.r1_lower, rp.r2_lower, rp.h_test_b1, rp.h_test_b2, rp.h_key_b1, rp.h_key_b2)


def sweep_rows(model: str, mins, maxs, steps, workers: int | None = None) -> list:
    """Grid evaluation rows, lexicographic in (param1, param2).

    Points are independent, so large grids run through a process pool;
    results keep the grid order either way.
    """
    names = MODEL_PARAMS.get(model)
    if not names or len(names) != 2:
        raise ValueError(f"sweep needs a two-parameter model, got {model!r}")
    if steps[0] < 2 or steps[1] < 2:
        raise ValueError("each axis needs at least 2 steps")
    if mins[0] > maxs[0] or mins[1] > maxs[1]:
        raise ValueError("axis minimum exceeds maximum")
    axis1 = np.linspace(mins[0], maxs[0], steps[0])
    axis2 = np.linspace(mins[1], maxs[1], steps[1])
    tasks = [
        (model, names[0], names[1], float(p1), float(p2)) for p1 in axis1 for p2 in axis2
    ]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(tasks) >= 128:
        chunk = max(1, len(tasks) // (4 * workers))
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, tasks, chunksize=chunk))
    return [_sweep_point(task) for task in tasks]


SWEEP_HEADER = "param1,param2,r1_lower,r2_lower,h_test_b1,h_test_b2,h_key_b1,h_key_b2"


def cmd_sweep(args) -> int:
    if args.out is None:
        raise ValueError("--out is required for sweep")
    mins = _axis_pair(args.min if args.min is not None else "0", "min")
    maxs = _axis_pair(args.max if args.max is not None else "1", "max")
    grid = args.grid if args.grid is not None else "11"
    steps = tuple(int(v) for v in _axis_pair(grid, "grid"))
    rows = sweep_rows(args.model, mins, maxs, steps)
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# finite-key

def cmd_finite_key(args) -> int:
    scenario = _scenario_from_args(args)
    n = args.n if args.n is not None else 1000
    p_test = args.p_test if args.p_test is not None else 0.1
    seed = args.seed if args.seed is not None else 0
    margin = args.margin if args.margin is not None else 8
    session = sample_runs(scenario, n, p_test, seed)
    est = estimate_and_decide(session)
    print(f"model={scenario.model}")
    for key, value in scenario.descriptor[1]:
        print(f"{_PARAM_TO_FLAG.get(key, key)}={_fmt(value)}")
    print(f"n={n}")
    print(f"p_test={_fmt(p_test)}")
    print(f"seed={seed}")
    print(f"key_runs={int(session.mask_key().sum())}")
    print(f"test_b1_runs={int(session.mask_test_b1().sum())}")
    print(f"test_b2_runs={int(session.mask_test_b2().sum())}")
    print(f"r1_est={_fmt(est.r1_est)}")
    print(f"r2_est={_fmt(est.r2_est)}")
    print(f"abort={'true' if est.abort else 'false'}")
    if est.abort:
        return 0
    rec = reconcile(session, margin, seed)
    nkey = int(session.mask_key().sum())
    for tag, pair, rate, h_pair in (
        ("b1", rec.pair_b1, est.r1_est, est.h_key_b1),
        ("b2", rec.pair_b2, est.r2_est, est.h_key_b2),
    ):
        raw_len = pair.alice_key.size
        # charge only the hash overhead beyond the entropy already priced into the rate
        extra_leak = max(0, pair.leak_bits - int(np.ceil(nkey * h_pair)))
        target = max(0, min(raw_len, int(np.floor(nkey * rate)) - extra_leak))
        final = privacy_amplify(pair.bob_key, target, seed)
        print(f"reconcile_failures_{tag}={len(pair.failed_blocks)}")
        print(f"leak_bits_{tag}={pair.leak_bits}")
        print(f"raw_key_bits_{tag}={raw_len}")
        print(f"final_key_bits_{tag}={final.size}")
    if args.export is not None:
        from .postprocess import export_records

        with open(args.export, "w", encoding="ascii", newline="\n") as fh:
            fh.write(export_records(session))
        print(f"records={args.export}")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing

def _read_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdc21",
        description="2-1 secure dense coding: verification, key-rate bounds, sweeps, finite-key runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_model: bool):
        p.add_argument("--config", help="key=value file mirroring the flags; flags override")
        p.add_argument("--seed", type=int, help="RNG seed where applicable")
        if with_model:
            p.add_argument("--model", choices=sorted(MODEL_PARAMS), help="noise model")
            p.add_argument("--lambda", dest="lambda", type=float, help="depolarizing weight, sender-1 leg")
            p.add_argument("--delta", type=float, help="depolarizing weight, sender-2 leg")
            p.add_argument("--lambda-f", dest="lambda_f", type=float, help="correlated noise, forward")
            p.add_argument("--lambda-b", dest="lambda_b", type=float, help="correlated noise, backward")
            p.add_argument("--gamma1", type=float, help="amplitude damping, sender-1 leg")
            p.add_argument("--gamma2", type=float, help="amplitude damping, sender-2 leg")

    p_verify = sub.add_parser("verify", help="run the full invariant suite")
    add_common(p_verify, with_model=False)

    p_rate = sub.add_parser("rate", help="key-rate bounds for one scenario")
    add_common(p_rate, with_model=True)

    p_sweep = sub.add_parser("sweep", help="grid evaluation to CSV")
    add_common(p_sweep, with_model=True)
    p_sweep.add_argument("--grid", help="steps per axis (one int or 'n1,n2')")
    p_sweep.add_argument("--min", help="axis minima (one value or 'a,b')")
    p_sweep.add_argument("--max", help="axis maxima (one value or 'a,b')")
    p_sweep.add_argument("--out", help="output CSV path")

    p_fk = sub.add_parser("finite-key", help="sample a session and post-process it")
    add_common(p_fk, with_model=True)
    p_fk.add_argument("--n", type=int, help="number of runs (default 1000)")
    p_fk.add_argument("--p-test", dest="p_test", type=float, help="per-party test probability (default 0.1)")
    p_fk.add_argument("--margin", type=int, help="reconciliation margin bits per block (default 8)")
    p_fk.add_argument("--export", help="write per-run records to this path")

    return parser


def _apply_config(args, parser) -> None:
    if getattr(args, "config", None) is None:
        return
    values = _read_config(args.config)
    known = {
        "model": str,
        "lambda": float,
        "delta": float,
        "lambda-f": float,
        "lambda-b": float,
        "gamma1": float,
        "gamma2": float,
        "seed": int,
        "n": int,
        "p-test": float,
        "margin": int,
        "grid": str,
        "min": str,
        "max": str,
        "out": str,
        "export": str,
    }
    for key, raw in values.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            continue  # key belongs to another subcommand
        if getattr(args, attr) is None:
            setattr(args, attr, known[key](raw))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "verify": cmd_verify,
        "rate": cmd_rate,
        "sweep": cmd_sweep,
        "finite-key": cmd_finite_key,
    }
    try:
        _apply_config(args, parser)
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
