"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from csshash.channels import (
    bell_mixture,
    bell_state,
    cat4_channels,
    cat4_mixture,
    cat4_table_mixture,
    cat_state,
    example_8q,
    pauli_channel_distribution,
)
from csshash.cli import sweep
from csshash.gf2 import BitMatrix, column_space_key, kernel_basis
from csshash.permcliff import build_theta_structure, enumerate_valid_k1, sampler_for, verify_permutation
from csshash.simulator import (
    NoCandidate,
    build_typical_set,
    count_matching,
    drift_check,
    make_schedule,
    plant_candidate,
    prepare,
    survival_counts,
    binomial_z,
    copy_counts,
    trial_rng,
)
from csshash.stabilizer import css_canonicalize
from csshash.yieldlp import (
    DiagonalMixture,
    build_J,
    cnot_only_yield_8q,
    compute_yield,
    cosets,
    entropy,
)

CAT4_LP = [
    "m_z >= 0",
    "m_x >= H - H[0,1]",
    "m_z + m_x >= H - H[1,1]",
    "2m_z + m_x >= H - H[2,1]",
    "3m_z + m_x >= H",
]


def test_criterion_1_cat4_structure(report):
    t0 = time.perf_counter()
    css = css_canonicalize(cat_state(4))
    ts = build_theta_structure(css.theta)
    theta_ok = css.theta == BitMatrix.from_lists([[1, 1, 1]])
    # C_i entries live in ker(constraint_C) = {0}; B_i entry tuples in the even-weight space
    c_zero = kernel_basis(ts.constraint_C).ncols == 0
    even = column_space_key(BitMatrix.from_columns([1 | (1 << j) for j in range(1, 4)], 4))
    b_sum = column_space_key(kernel_basis(ts.constraint_B)) == even
    _, sample = sampler_for(css)
    rng = np.random.default_rng(1)
    for _ in range(20):
        pc = sample(3, rng)
        c_zero &= all(C.is_zero() for C in pc.C_blocks)
        total = pc.B_blocks[0] + pc.B_blocks[1] + pc.B_blocks[2] + pc.B_blocks[3]
        b_sum &= total.is_zero()
    lp = compute_yield(css, cat4_mixture(0.9)).constraint_text()
    elapsed = time.perf_counter() - t0
    ok = theta_ok and c_zero and b_sum and lp == CAT4_LP and elapsed < 1.0
    report(1, ok, f"theta={theta_ok} C_i=0:{c_zero} sum B_i=0:{b_sum} LP verbatim:{lp == CAT4_LP} ({elapsed:.2f}s)")
    assert ok


def test_criterion_2_coset_table(report):
    t0 = time.perf_counter()
    ts = build_theta_structure(css_canonicalize(cat_state(4)).theta)
    J = build_J(ts, False, BitMatrix.from_lists([[1, 0], [1, 1], [0, 1]]), BitMatrix.zeros(1, 0))

    def s(b):
        return "".join(str((b >> j) & 1) for j in range(4))

    got = [sorted(s(b) for b in c) for c in cosets(4, J)]
    expected = [
        ["0000", "0001", "1110", "1111"],
        ["0010", "0011", "1100", "1101"],
        ["0100", "0101", "1010", "1011"],
        ["1000", "1001", "0110", "0111"],
    ]
    elapsed = time.perf_counter() - t0
    as_sets = {frozenset(c) for c in got}
    ok = got[0] == expected[0] and as_sets == {frozenset(c) for c in expected} and elapsed < 1.0
    report(2, ok, f"cosets={got} ({elapsed:.2f}s)")
    assert ok


def test_criterion_3_eight_qubit_example(report):
    t0 = time.perf_counter()
    css, mix = example_8q()
    res = compute_yield(css, mix)
    H_exact = -(3 / 4) * math.log2(3 / 4) - (127 / 508) * math.log2(1 / 508)
    cnot = cnot_only_yield_8q(mix)
    elapsed = time.perf_counter() - t0
    clauses = {
        "H exact": abs(res.H - H_exact) < 1e-12,
        "gamma=0.3605+-0.0005": abs(res.gamma - 0.3605) <= 0.0005,
        "cnot=0.29+-0.005": abs(cnot - 0.29) <= 0.005,
        "gamma>cnot": res.gamma > cnot,
        "time<5s": elapsed < 5.0,
    }
    ok = all(clauses.values())
    report(
        3,
        ok,
        f"gamma={res.gamma:.4f} (1-H/4={1 - res.H / 4:.4f}) cnot={cnot:.4f} "
        f"active={res.active_constraints} {clauses} ({elapsed:.2f}s)",
    )
    assert ok


def test_criterion_4_channel_matrix(report):
    rng = np.random.default_rng(4)
    exact_ok = float_ok = True
    worst = 0.0
    for _ in range(20):
        F = Fraction(int(rng.integers(0, 1001)), 1000)
        exact_ok &= pauli_channel_distribution(cat_state(4), cat4_channels(F)) == cat4_table_mixture(F)
        Ff = float(rng.uniform(0, 1))
        got = pauli_channel_distribution(cat_state(4), cat4_channels(Ff))
        ref = cat4_table_mixture(Ff)
        worst = max(worst, max(abs(a - b) for a, b in zip(got, ref)))
    float_ok = worst < 1e-12
    ok = exact_ok and float_ok
    report(4, ok, f"rational exact:{exact_ok} float max err={worst:.2e}")
    assert ok


def test_criterion_5_yield_curves(report):
    t0 = time.perf_counter()
    rows = sweep(0.8, 1.0, 50)
    elapsed = time.perf_counter() - t0
    ordered = all(o >= l - 1e-12 and l >= m - 1e-12 for _, o, l, m in rows)
    strict = any(o > l + 1e-9 for _, o, l, m in rows)
    end = rows[-1] == (1.0, 1.0, 1.0, 1.0)
    ok = ordered and strict and end and len(rows) == 50 and elapsed < 30
    gap = max(o - l for _, o, l, m in rows)
    report(5, ok, f"ordered:{ordered} strict:{strict} (max gap {gap:.4f}) endpoints:{end} ({elapsed:.2f}s)")
    assert ok


def test_criterion_6_bell_hashing(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    done = 0
    while done < 10:
        p = rng.dirichlet([12.0, 1.0, 1.0, 1.0])
        H = -sum(x * math.log2(x) for x in p if x > 0)
        if H >= 1:
            # the yield is clamped at 0 there, so 1 - H is not its value
            continue
        res = compute_yield(bell_state(), bell_mixture(*p))
        worst = max(worst, abs(res.gamma - (1 - H)))
        done += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 1.0
    report(6, ok, f"max |gamma - (1-H)| = {worst:.2e} over 10 distributions ({elapsed:.2f}s)")
    assert ok


def test_criterion_7_permutation_suite(report):
    t0 = time.perf_counter()
    failures = 0
    rng = np.random.default_rng(7)
    for css in (bell_state(), cat_state(4), example_8q()[0]):
        c = css_canonicalize(css)
        _, sample = sampler_for(c)
        for k in (1, 2, 3, 4):
            for _ in range(1000):
                try:
                    verify_permutation(sample(k, rng), c)
                except ValueError:
                    failures += 1
    cat4 = css_canonicalize(cat_state(4))
    _, sample = sampler_for(cat4)
    valid = enumerate_valid_k1(cat4)
    seen = {sample(1, rng).key() for _ in range(500)}
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and seen == valid and elapsed < 60
    report(7, ok, f"12000 samples, {failures} failures; k=1 support {len(seen)} == enumerated {len(valid)}: {seen == valid} ({elapsed:.1f}s)")
    assert ok


def test_criterion_8_survival_law(report):
    t0 = time.perf_counter()
    setup = prepare(cat_state(4), cat4_mixture(0.9))
    k, m_z, m_x, trials = 12, 1 / 3, 1 / 3, 10_000
    nz, nx = copy_counts(k, m_z, m_x)
    schedule = make_schedule(k, m_z, m_x)
    parts = []
    ok = True
    deltas, labels = [], []
    for d in [(1, 0), (0, 1), (1, 1)]:
        try:
            deltas.append(plant_candidate(setup, k, d, trial_rng(8, 1000 + len(labels))))
            labels.append(d)
        except NoCandidate as e:
            ok = False
            parts.append(f"{d}: cannot plant ({e})")
    counts = survival_counts(setup, k, schedule, deltas, trials, seed=8)
    for d, c in zip(labels, counts.tolist()):
        pred = 2.0 ** -(d[0] * nz + d[1] * nx)
        z = binomial_z(c, trials, pred)
        ok &= abs(z) <= 3
        parts.append(f"{d}: {c}/{trials} vs {pred:.5f} (z={z:+.2f})")
    # drift on the z-steps for the lowest-degree candidate that sees them
    drift = drift_check(setup, None, k, schedule, trials, seed=88, degrees=(1, 1))
    ok &= drift.flat(0.01)
    parts.append(f"drift (1,1) z-steps p={drift.p_value:.3f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    report(8, ok, "; ".join(parts) + f" ({elapsed:.0f}s)")
    assert ok


def test_criterion_9_counting_identity(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    mismatches = checked = 0
    for n in (1, 2):
        for k in range(1, 9):
            mix = DiagonalMixture(n, rng.dirichlet(np.ones(1 << n)))
            ts = build_typical_set(mix, k, 0.3)
            Js = [BitMatrix.zeros(n, 0), BitMatrix.identity(n)] + [BitMatrix.from_columns([c], n) for c in range(1, 1 << n)]
            for J in Js:
                for u in ts.members[:: max(1, len(ts) // 6)].tolist():
                    enum, closed = count_matching(ts, J, int(u))
                    mismatches += enum != closed
                    checked += 1
    cheb_ok = True
    toy = DiagonalMixture(2, np.array([0.55, 0.2, 0.15, 0.1]))
    for k in (8, 16, 32):
        for eps in (0.05, 0.1, 0.2):
            ts = build_typical_set(toy, k, eps, sampling=True, samples=10_000, rng=rng)
            cheb_ok &= ts.mass >= 1 - ts.chebyshev_bound()
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and checked > 0 and cheb_ok and elapsed < 60
    report(9, ok, f"{checked} count checks, {mismatches} mismatches; Chebyshev respected: {cheb_ok} ({elapsed:.1f}s)")
    assert ok
