import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from csshash.channels import bell_mixture, bell_state, cat4_mixture, cat_state, example_8q
from csshash.gf2 import BitMatrix, column_space_key
from csshash.permcliff import build_theta_structure
from csshash.stabilizer import admissible_permutations, css_canonicalize
from csshash.yieldlp import (
    BadDimensions,
    DiagonalMixture,
    H_dd,
    baseline_yields,
    build_J,
    cnot_only_yield_8q,
    compute_yield,
    coset_entropy,
    cosets,
    entropy,
    lp_solve,
    marginal_entropy,
    working_mixture,
)

CAT4 = css_canonicalize(cat_state(4))
TS4 = build_theta_structure(CAT4.theta)


def bits(b, n):
    return "".join(str((b >> j) & 1) for j in range(n))


def plain_entropy(p):
    return -sum(x * math.log2(x) for x in p if x > 0)


def test_entropy_basics():
    assert entropy(DiagonalMixture.uniform(3)) == pytest.approx(3.0)
    assert entropy(DiagonalMixture.point_mass(3, 5)) == 0.0
    mix = cat4_mixture(0.9)
    assert entropy(mix) == pytest.approx(plain_entropy(mix.p), abs=1e-12)


def test_mixture_validation():
    with pytest.raises(ValueError):
        DiagonalMixture(1, np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        DiagonalMixture(1, np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        DiagonalMixture(2, np.array([1.0, 0.0]))


def test_cat4_lp_text():
    res = compute_yield(CAT4, cat4_mixture(0.9))
    assert res.constraint_text() == [
        "m_z >= 0",
        "m_x >= H - H[0,1]",
        "m_z + m_x >= H - H[1,1]",
        "2m_z + m_x >= H - H[2,1]",
        "3m_z + m_x >= H",
    ]


def test_cat4_coset_table():
    G_z = BitMatrix.from_lists([[1, 0], [1, 1], [0, 1]])
    J = build_J(TS4, False, G_z, BitMatrix.zeros(1, 0))
    got = [{bits(b, 4) for b in c} for c in cosets(4, J)]
    expected = [
        {"0000", "0001", "1110", "1111"},
        {"0010", "0011", "1100", "1101"},
        {"0100", "0101", "1010", "1011"},
        {"1000", "1001", "0110", "0111"},
    ]
    assert got[0] == expected[0]
    assert sorted(map(sorted, got)) == sorted(map(sorted, expected))


def test_cat4_H_special_cases():
    mix = cat4_mixture(0.9)
    H = entropy(mix)
    assert H_dd(mix, TS4, False, 2, 0)[0] == pytest.approx(H)
    assert H_dd(mix, TS4, False, 3, 1)[0] == pytest.approx(0.0, abs=1e-12)
    # d_z = 0: entropy of b_1 b_2 b_3
    assert H_dd(mix, TS4, False, 0, 1)[0] == pytest.approx(marginal_entropy(mix, [0, 1, 2]))


def brute_H_dd(mix, ts, orth, d_z, d_x):
    """Oracle: subspaces as distinct spans of vector tuples, cosets by explicit grouping."""
    n_z, n_x = ts.n_z, ts.n_x

    def subspaces(n, dim):
        seen = {}
        for vecs in itertools.combinations(range(1, 1 << n), dim):
            m = BitMatrix.from_columns(list(vecs), n)
            key = column_space_key(m)
            if len(key) == dim and key not in seen:
                seen[key] = m
        if dim == 0:
            seen[()] = BitMatrix.zeros(n, 0)
        return list(seen.values())

    best = math.inf
    for G_z in subspaces(n_z, n_z - d_z):
        for G_x in subspaces(n_x, n_x - d_x):
            J = build_J(ts, orth, G_z, G_x)
            perp = [w for w in range(1 << mix.n) if not any((J.T @ BitMatrix([w], mix.n).T).rows)]
            groups = {}
            for b in range(1 << mix.n):
                rep = min(b ^ w for w in perp)
                groups[rep] = groups.get(rep, 0.0) + mix.p[b]
            best = min(best, plain_entropy(groups.values()))
    return best


@pytest.mark.parametrize("F", [0.85, 0.93])
def test_cat4_H_table_against_oracle(F):
    mix = working_mixture(CAT4, cat4_mixture(F))
    for dz in range(4):
        for dx in range(2):
            if (dz, dx) == (0, 0):
                continue
            assert H_dd(mix, TS4, False, dz, dx)[0] == pytest.approx(brute_H_dd(mix, TS4, False, dz, dx), abs=1e-12)


tables = st.lists(st.floats(0, 1), min_size=5, max_size=5)


@given(st.floats(0.1, 3.0), st.lists(st.floats(0, 1), min_size=7, max_size=7))
def test_lp_solve_matches_linprog(H, fracs):
    grid = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (3, 1), (2, 2)]
    table = {g: H * f for g, f in zip(grid, fracs)}
    mz, mx = lp_solve(H, table)
    A = [[-a, -b] for a, b in grid]
    rhs = [-(H - table[g]) for g in grid]
    ref = linprog([1, 1], A_ub=A, b_ub=rhs, bounds=[(0, None), (0, None)], method="highs")
    assert ref.success
    assert mz + mx == pytest.approx(ref.fun, abs=1e-9)
    for (a, b), h in table.items():
        assert a * mz + b * mx >= H - h - 1e-9


def test_cat4_perfect_fidelity():
    assert compute_yield(CAT4, cat4_mixture(1.0)).gamma == 1.0


def test_bell_hashing(rng):
    for _ in range(5):
        p = rng.dirichlet(np.ones(4))
        res = compute_yield(bell_state(), bell_mixture(*p))
        assert res.gamma == pytest.approx(max(0.0, 1 - plain_entropy(p)), abs=1e-9)


def test_yield_independent_of_qubit_order():
    css = cat_state(4)
    mix = cat4_mixture(0.93)
    values = {
        round(compute_yield(css_canonicalize(css, perm), mix).gamma, 12)
        for perm in admissible_permutations(css)[::5]
    }
    assert len(values) == 1


def test_baseline_ordering():
    for F in np.linspace(0.8, 1.0, 21):
        man, lo = baseline_yields(cat4_mixture(F))
        assert lo >= man - 1e-12


def test_8q_entropy_and_cnot_value():
    css, mix = example_8q()
    H = -(3 / 4) * math.log2(3 / 4) - (127 / 508) * math.log2(1 / 508)
    assert entropy(mix) == pytest.approx(H, abs=1e-12)
    assert cnot_only_yield_8q(mix) == pytest.approx(0.29, abs=0.005)


def test_8q_lp_optimum_against_oracle():
    # the optimum is recomputed from an independently built table of the
    # diagonal rows, which are the only ones real candidates can occupy
    css, mix = example_8q()
    c = css_canonicalize(css)
    res = compute_yield(c, mix)
    work = working_mixture(c, mix)
    ts = build_theta_structure(c.theta)
    H = entropy(work)
    diag = {d: brute_H_dd(work, ts, True, d, d) for d in range(1, 5)}
    for d, h in diag.items():
        assert res.table[(d, d)] == pytest.approx(h, abs=1e-12)
    grid = sorted(res.table)
    ref = linprog(
        [1, 1],
        A_ub=[[-a, -b] for a, b in grid],
        b_ub=[-(H - res.table[g]) for g in grid],
        bounds=[(0, None), (0, None)],
        method="highs",
    )
    assert res.m_z + res.m_x == pytest.approx(ref.fun, abs=1e-9)
    assert res.gamma > cnot_only_yield_8q(mix)


def test_build_J_checks_dimensions():
    with pytest.raises(BadDimensions):
        build_J(TS4, False, BitMatrix.identity(2), BitMatrix.zeros(1, 0))


def test_coset_entropy_trivial_J():
    mix = cat4_mixture(0.9)
    J0 = BitMatrix.zeros(4, 0)
    assert coset_entropy(mix, J0) == pytest.approx(0.0, abs=1e-12)
    assert coset_entropy(mix, BitMatrix.identity(4)) == pytest.approx(entropy(mix))


def test_8q_binding_row_is_two_qubit_marginal():
    from csshash.channels import example_8q
    from csshash.yieldlp import marginal_entropy, working_mixture

    css, mix = example_8q()
    res = compute_yield(css, mix)
    work = working_mixture(css, mix)
    # generator channels stay separate, so three hidden x-generators leave only (b_1, b_5)
    assert res.table[3, 3] == pytest.approx(marginal_entropy(work, [0, 4]), abs=1e-12)
    assert res.m_x == pytest.approx((res.H - res.table[3, 3]) / 3, abs=1e-9)
