"""Desk-scale finite-key pipeline: sampling, estimation, reconciliation, hashing.

Raw keys are sampled from the exact run distributions, the abort decision
applies the plug-in rate estimates, reconciliation publishes Toeplitz
hashes of the receiver's raw key which each sender inverts by minimum-weight
syndrome decoding, and privacy amplification is another Toeplitz hash.

The quantum-decoder step of the underlying protocol is replaced here by the
classical blockwise decoder; block success is checked against the
receiver's true string, which a demonstrator can do and a deployment would
replace with a verification hash.

All randomness is drawn from counter-based Philox streams keyed by the
64-bit session seed (plus a purpose tag), so every stage is a pure function
of its inputs; per-run randomness occupies a fixed row of one seeded table,
keeping runs independent and the sampling order irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .channels import NoiseScenario
from .protocol import (
    LabeledDistribution,
    keygen_distribution,
    test_b1_distribution,
    test_b2_distribution,
    test_both_distribution,
)
from .rates import _key_terms, _test_term_b1, _test_term_b2

_ABSENT = -1
# purpose tags keep the Philox streams of the pipeline stages disjoint
_TAG_RUNS, _TAG_RECONCILE = 0x71, 0x72


_M64 = 2**64 - 1


def _mix64(x: int) -> int:
    """splitmix64 finalizer; folds derivation words into well-spread 64-bit values."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _gen(seed: int, *words: int) -> np.random.Generator:
    h = _mix64(int(seed))
    for w in words:
        h = _mix64(h ^ _mix64((int(w) + 0x9E3779B97F4A7C15) & _M64))
    key = (_mix64(h ^ 0xA5A5A5A5A5A5A5A5) << 64) | h
    return np.random.Generator(np.random.Philox(key=key or 1))


@dataclass(frozen=True)
class ToeplitzHash:
    """GF(2)-linear Toeplitz hash; matrix bits derived from the 64-bit seed."""

    in_len: int
    out_len: int
    seed: int

    def __post_init__(self):
        if self.in_len < 0 or not 0 <= self.out_len <= self.in_len:
            raise ValueError(f"need 0 <= out_len <= in_len, got {self.out_len}, {self.in_len}")

    def diagonal_bits(self) -> np.ndarray:
        """The out_len + in_len - 1 defining bits: first column then rest of first row."""
        count = self.out_len + self.in_len - 1
        if count <= 0:
            return np.zeros(0, dtype=np.uint8)
        return _gen(self.seed).integers(0, 2, size=count, dtype=np.uint8)

    def matrix(self) -> np.ndarray:
        """Explicit out_len x in_len matrix; T[r, c] = bit at diagonal r - c."""
        t = self.diagonal_bits()
        rows = np.arange(self.out_len)[:, None]
        cols = np.arange(self.in_len)[None, :]
        return t[rows - cols + self.in_len - 1] if self.out_len else np.zeros((0, self.in_len), np.uint8)


def toeplitz_apply(h: ToeplitzHash, bits) -> np.ndarray:
    """GF(2) Toeplitz matrix-vector product via exact integer FFT convolution."""
    v = np.asarray(bits, dtype=np.int64).ravel()
    if v.size != h.in_len:
        raise ValueError(f"input length {v.size} does not match in_len {h.in_len}")
    if h.out_len == 0:
        return np.zeros(0, dtype=np.uint8)
    t = h.diagonal_bits().astype(np.int64)
    size = 1 << int(np.ceil(np.log2(t.size + v.size)))
    conv = np.fft.irfft(np.fft.rfft(t, size) * np.fft.rfft(v, size), size)
    conv = np.rint(conv).astype(np.int64)
    # (T v)[r] = conv[r + in_len - 1] with the diagonal-bit layout above
    return (conv[h.in_len - 1 : h.in_len - 1 + h.out_len] % 2).astype(np.uint8)


@dataclass
class KeySession:
    """Per-run outcome records of one sampled protocol session.

    The columns are int8 arrays of length n; absent bits (a party did not
    produce that outcome in the realized run type) are stored as -1.
    """

    n: int
    p_test: float
    seed: int
    descriptor: tuple
    bob1_test: np.ndarray
    bob2_test: np.ndarray
    bits: dict  # name -> int8 column for "i","j","k","x","y","z","s"
    estimate: "RateEstimate | None" = field(default=None)

    def mask_key(self) -> np.ndarray:
        return ~self.bob1_test & ~self.bob2_test

    def mask_test_b1(self) -> np.ndarray:
        return self.bob1_test & ~self.bob2_test

    def mask_test_b2(self) -> np.ndarray:
        return ~self.bob1_test & self.bob2_test


@dataclass(frozen=True)
class RateEstimate:
    r1_est: float
    r2_est: float
    abort: bool
    h_key_b1: float
    h_key_b2: float
    h_test_b1: float
    h_test_b2: float


def _sample_outcomes(dist: LabeledDistribution, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sample of flattened cell indices for uniforms ``u``."""
    cdf = np.cumsum(dist.table.ravel())
    cdf[-1] = 1.0
    return np.searchsorted(cdf, u, side="right")


def _unpack_bits(idx: np.ndarray, nvars: int) -> np.ndarray:
    """(len(idx), nvars) array of bits, most significant variable first."""
    shifts = np.arange(nvars - 1, -1, -1)
    return (idx[:, None] >> shifts[None, :]) & 1


def sample_runs(scenario: NoiseScenario, n: int, p_test: float, seed: int) -> KeySession:
    """Sample ``n`` i.i.d. protocol runs; each sender tests with probability p_test.

    Outcomes come from the exact joint distribution of the realized
    run-type pair. When both senders test, only their own outcome bits are
    recorded; the receiver gains nothing from such runs.
    """
    if n < 1:
        raise ValueError("need at least one run")
    if not 0.0 < p_test < 1.0:
        raise ValueError(f"p_test must lie strictly between 0 and 1, got {p_test}")
    u = _gen(seed, _TAG_RUNS).random((n, 3))
    b1_test = u[:, 0] < p_test
    b2_test = u[:, 1] < p_test
    bits = {name: np.full(n, _ABSENT, dtype=np.int8) for name in "ijkxyzs"}

    tables = {
        (False, False): keygen_distribution(scenario),
        (True, False): test_b1_distribution(scenario),
        (False, True): test_b2_distribution(scenario),
        (True, True): test_both_distribution(scenario),
    }
    for combo, dist in tables.items():
        mask = (b1_test == combo[0]) & (b2_test == combo[1])
        if not mask.any():
            continue
        cells = _unpack_bits(_sample_outcomes(dist, u[mask, 2]), len(dist.variables))
        for col, name in enumerate(dist.variables):
            bits[name][mask] = cells[:, col]
    return KeySession(n, float(p_test), int(seed), scenario.descriptor, b1_test, b2_test, bits)


def _empirical(session: KeySession, mask: np.ndarray, variables: tuple) -> LabeledDistribution:
    cols = [session.bits[v][mask].astype(np.int64) for v in variables]
    idx = np.zeros(int(mask.sum()), dtype=np.int64)
    for name, c in zip(variables, cols):
        if (c < 0).any():
            raise ValueError(f"outcome {name} absent in some selected runs")
        idx = (idx << 1) | c
    counts = np.bincount(idx, minlength=2 ** len(variables)).astype(float)
    return LabeledDistribution(variables, (counts / counts.sum()).reshape((2,) * len(variables)))


def estimate_and_decide(session: KeySession) -> RateEstimate:
    """Plug empirical conditional entropies into the rate bounds; abort on a negative one."""
    mk, m1, m2 = session.mask_key(), session.mask_test_b1(), session.mask_test_b2()
    if not mk.any():
        raise ValueError("session has no key-generation runs")
    if not m1.any():
        raise ValueError("session has no sender-1 test runs")
    if not m2.any():
        raise ValueError("session has no sender-2 test runs")
    hk1, hk2 = _key_terms(_empirical(session, mk, ("i", "j", "k", "x", "y", "z", "s")))
    ht1 = _test_term_b1(_empirical(session, m1, ("i", "j", "x", "y", "z", "s")))
    ht2 = _test_term_b2(_empirical(session, m2, ("k", "x", "y", "z", "s")))
    r1 = 2.0 - ht1 - (hk1 + hk2)
    r2 = 1.0 - ht2 - (hk1 + hk2)
    est = RateEstimate(r1, r2, bool(r1 < 0 or r2 < 0), hk1, hk2, ht1, ht2)
    session.estimate = est
    return est


def _raw_keys(session: KeySession) -> tuple:
    """Raw bit strings from the key runs: receiver/sender pairs for both links."""
    mk = session.mask_key()
    b = session.bits
    alice_b1 = np.column_stack([b["i"][mk], b["j"][mk]]).astype(np.uint8).ravel()
    bob1 = np.column_stack([b["x"][mk], b["y"][mk]]).astype(np.uint8).ravel()
    alice_b2 = b["k"][mk].astype(np.uint8)
    bob2 = b["z"][mk].astype(np.uint8)
    return alice_b1, bob1, alice_b2, bob2


def _decode_block(bob_block: np.ndarray, syndrome: np.ndarray, h: ToeplitzHash) -> np.ndarray:
    """Minimum-weight error pattern e with hash(e) == syndrome, applied to bob's block."""
    target = syndrome ^ toeplitz_apply(h, bob_block)
    if not target.any():
        return bob_block.copy()
    length = h.in_len
    unit_hashes = h.matrix().T  # row c is hash of the unit vector at position c
    for weight in range(1, length + 1):
        for support in combinations(range(length), weight):
            acc = unit_hashes[support[0]].copy()
            for pos in support[1:]:
                acc ^= unit_hashes[pos]
            if np.array_equal(acc % 2, target):
                out = bob_block.copy()
                out[list(support)] ^= 1
                return out
    raise AssertionError("syndrome has no preimage, which contradicts linearity")


@dataclass(frozen=True)
class PairReconciliation:
    """Outcome of reconciling one receiver/sender key pair."""

    alice_key: np.ndarray
    bob_key: np.ndarray
    leak_bits: int
    failed_blocks: tuple

    @property
    def succeeded(self) -> bool:
        return not self.failed_blocks


@dataclass(frozen=True)
class ReconcileResult:
    pair_b1: PairReconciliation
    pair_b2: PairReconciliation

    @property
    def leak_bits(self) -> dict:
        return {"b1": self.pair_b1.leak_bits, "b2": self.pair_b2.leak_bits}


def _reconcile_pair(
    alice: np.ndarray,
    bob: np.ndarray,
    h_per_bit: float,
    margin_bits: int,
    block_bits: int,
    seed: int,
    pair_tag: int,
) -> PairReconciliation:
    nbits = alice.size
    failed = []
    leak = 0
    decoded = np.zeros(nbits, dtype=np.uint8)
    for bi, start in enumerate(range(0, nbits, block_bits)):
        a = alice[start : start + block_bits]
        b = bob[start : start + block_bits]
        length = a.size
        m = int(np.ceil(length * max(h_per_bit, 0.0))) + margin_bits
        if m >= length:
            # hashing would cost as much as the block itself; disclose it
            leak += length
            decoded[start : start + length] = a
            continue
        h = ToeplitzHash(length, m, _gen(seed, _TAG_RECONCILE, pair_tag, bi).integers(2**63))
        leak += m
        guess = _decode_block(b, toeplitz_apply(h, a), h)
        decoded[start : start + length] = guess
        if not np.array_equal(guess, a):
            failed.append(bi)
    return PairReconciliation(alice.copy(), decoded, leak, tuple(failed))


def reconcile(
    session: KeySession, margin_bits: int, seed: int, block_bits: int = 12
) -> ReconcileResult:
    """Blockwise hash reconciliation of both raw key pairs.

    The receiver publishes, per block of her raw key, a Toeplitz hash of
    ceil(block * H_est) + margin_bits output bits; the sender decodes by
    minimum-weight syndrome search, exact for the block lengths used here.
    Requires a non-aborted session estimate (estimate_and_decide is run on
    demand).
    """
    if margin_bits < 0:
        raise ValueError("margin_bits must be nonnegative")
    if not 1 <= block_bits <= 20:
        raise ValueError("block_bits must lie in [1, 20]")
    est = session.estimate or estimate_and_decide(session)
    if est.abort:
        raise ValueError("session aborted; there is no key to reconcile")
    alice_b1, bob1, alice_b2, bob2 = _raw_keys(session)
    pair1 = _reconcile_pair(alice_b1, bob1, est.h_key_b1 / 2, margin_bits, block_bits, seed, 1)
    pair2 = _reconcile_pair(alice_b2, bob2, est.h_key_b2, margin_bits, block_bits, seed, 2)
    return ReconcileResult(pair1, pair2)


def privacy_amplify(key, target_len: int, seed: int) -> np.ndarray:
    """Compress a reconciled key to target_len bits with a seeded Toeplitz hash."""
    bits = np.asarray(key, dtype=np.uint8).ravel()
    if target_len < 0:
        raise ValueError("target_len must be nonnegative")
    if target_len > bits.size:
        raise ValueError(f"target_len {target_len} exceeds key length {bits.size}")
    return toeplitz_apply(ToeplitzHash(bits.size, target_len, seed), bits)


def export_records(session: KeySession) -> str:
    """Line-oriented dump: run index, run types, then i j k x y z s with '-' for absent."""
    b = session.bits
    lines = []
    for r in range(session.n):
        types = ("T" if session.bob1_test[r] else "K") + ("T" if session.bob2_test[r] else "K")
        vals = " ".join(
            "-" if b[name][r] == _ABSENT else str(int(b[name][r])) for name in "ijkxyzs"
        )
        lines.append(f"{r} {types} {vals}")
    return "\n".join(lines) + "\n"
