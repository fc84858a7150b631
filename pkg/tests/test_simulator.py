import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from csshash.channels import bell_mixture, bell_state, cat4_mixture, cat_state
from csshash.gf2 import BitMatrix, TooLarge
from csshash.simulator import (
    BadSchedule,
    NoCandidate,
    binomial_z,
    build_typical_set,
    copy_counts,
    count_matching,
    drift_check,
    eliminate,
    exhaustive_survival,
    failure_rate,
    make_schedule,
    mean_survivors,
    pack_symbols,
    pack_symbols_int,
    plant_candidate,
    prepare,
    run_protocol,
    survival_counts,
    survival_experiment,
    trial_rng,
    unpack_symbols,
)
from csshash.yieldlp import DiagonalMixture

TOY = DiagonalMixture(2, np.array([0.55, 0.2, 0.15, 0.1]))


@pytest.fixture(scope="module")
def cat4():
    return prepare(cat_state(4), cat4_mixture(0.9))


@pytest.fixture(scope="module")
def bell():
    return prepare(bell_state(), bell_mixture(0.7, 0.1, 0.1, 0.1))


def test_pack_roundtrip(rng):
    syms = rng.integers(0, 16, size=(20, 5))
    packed = pack_symbols(syms, 4, 5)
    assert (unpack_symbols(packed, 4, 5) == syms).all()
    assert [pack_symbols_int(r, 4, 5) for r in syms.tolist()] == packed.tolist()


def test_typical_point_mass():
    ts = build_typical_set(DiagonalMixture.point_mass(2), 5, 0.1)
    assert ts.members.tolist() == [0]
    assert ts.mass == pytest.approx(1.0)


def test_typical_fair_coin():
    ts = build_typical_set(DiagonalMixture.uniform(1), 4, 0.3)
    assert len(ts) == 14


def test_typical_membership_oracle():
    ts = build_typical_set(TOY, 5, 0.2)
    members = set(ts.members.tolist())
    for b in range(1 << 10):
        syms = unpack_symbols(b, 2, 5)
        f = np.bincount(syms, minlength=4) / 5
        assert (b in members) == bool(np.all(np.abs(f - TOY.p) < 0.2))
        assert ts.contains(b) == (b in members)


def test_typical_guard():
    with pytest.raises(TooLarge):
        build_typical_set(TOY, 13, 0.1)


@pytest.mark.parametrize("k,eps", [(8, 0.2), (16, 0.1), (32, 0.2)])
def test_chebyshev_bound_sampled(k, eps, rng):
    ts = build_typical_set(TOY, k, eps, sampling=True, samples=4000, rng=rng)
    assert ts.mass >= 1 - ts.chebyshev_bound()


def test_count_matching_trivial_J():
    ts = build_typical_set(TOY, 6, 0.25)
    u = int(ts.members[0])
    assert count_matching(ts, BitMatrix.identity(2), u) == (1, 1)
    full = count_matching(ts, BitMatrix.zeros(2, 0), u)
    assert full == (len(ts), len(ts))


@pytest.mark.parametrize("k", [2, 4, 6, 8])
@pytest.mark.parametrize("n", [1, 2])
def test_count_matching_identity_grid(n, k, rng):
    p = rng.dirichlet(np.ones(1 << n))
    mix = DiagonalMixture(n, p)
    ts = build_typical_set(mix, k, 0.3)
    if not len(ts):
        return
    Js = [BitMatrix.zeros(n, 0), BitMatrix.identity(n)] + [BitMatrix.from_columns([c], n) for c in range(1, 1 << n)]
    for J in Js:
        for u in ts.members[:: max(1, len(ts) // 5)].tolist():
            enum, closed = count_matching(ts, J, int(u))
            assert enum == closed


def test_count_matching_against_loop_oracle():
    ts = build_typical_set(TOY, 6, 0.2)
    J = BitMatrix.from_lists([[1], [1]])
    for u in ts.members[:10].tolist():
        lab_u = [(a & 1) ^ (a >> 1) for a in unpack_symbols(u, 2, 6).tolist()]
        count = 0
        for s in ts.symbols.tolist():
            count += [(a & 1) ^ (a >> 1) for a in s] == lab_u
        assert count_matching(ts, J, int(u))[0] == count


def test_schedule_rounding():
    assert copy_counts(12, 1 / 3, 1 / 3) == (4, 4)
    assert copy_counts(10, 0.25, 0.25) == (3, 3)
    assert make_schedule(6, 0.5, 0.2) == ["z"] * 3 + ["x"] * 2
    with pytest.raises(BadSchedule):
        copy_counts(4, 0.6, 0.5)


def test_pure_input_always_succeeds(rng):
    mix = DiagonalMixture.point_mass(4)
    pool = build_typical_set(mix, 3, 0.1).members.tolist()
    for sched in [(1 / 3, 1 / 3), (0.0, 1.0), (1.0, 0.0), (0.0, 0.0)]:
        run = run_protocol(cat_state(4), mix, 3, *sched, pool, rng)
        assert run.truth == 0 and run.survivors == [0] and run.success


def test_pure_input_pool_all_of_space(rng):
    setup = prepare(cat_state(4), DiagonalMixture.point_mass(4))
    run = run_protocol(setup, None, 2, 0.5, 0.5, None, rng)
    # two measured copies leave the unmeasured phases free; truth must be among the survivors
    assert run.truth == 0 and 0 in run.survivors
    assert len(run.survivors) == 1 << (8 - 3 - 1)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_truth_never_eliminated(seed):
    rng = np.random.default_rng(seed)
    setup = prepare(cat_state(4), cat4_mixture(0.85))
    pool = rng.integers(0, 1 << 16, size=50).tolist()
    for mode in ("overall", "stepwise"):
        run = run_protocol(setup, None, 4, 0.25, 0.5, pool, rng, mode=mode)
        assert run.truth in run.survivors


def test_explicit_truth_must_be_in_pool(rng, cat4):
    with pytest.raises(ValueError):
        run_protocol(cat4, None, 3, 1 / 3, 1 / 3, [1, 2], rng, truth=0)


def test_revealed_bits_count(rng, cat4):
    run = run_protocol(cat4, None, 6, 1 / 3, 1 / 3, [0], rng)
    assert len(run.revealed) == 2 * 3 + 2 * 1


def test_plant_candidate_degrees(cat4, rng):
    for d in [(0, 1), (1, 1), (2, 1), (3, 1)]:
        delta = plant_candidate(cat4, 6, d, rng)
        assert cat4.degrees(6, delta) == d
    with pytest.raises(NoCandidate):
        plant_candidate(cat4, 6, (1, 0), rng)


def test_survival_law_small(cat4):
    res = survival_experiment(cat4, None, 6, 1 / 3, 1 / 6, 3000, seed=4, degrees=[(0, 0), (0, 1), (1, 1)])
    by = {(s.d_z, s.d_x): s for s in res}
    assert by[(0, 0)].survivals == by[(0, 0)].trials
    for s in res:
        assert s.within(3.0), s


def test_views_agree(cat4):
    kw = dict(degrees=[(0, 1), (1, 1)], seed=9)
    a = survival_experiment(cat4, None, 6, 1 / 6, 1 / 6, 3000, mode="overall", **kw)
    b = survival_experiment(cat4, None, 6, 1 / 6, 1 / 6, 3000, mode="stepwise", **kw)
    for x, y in zip(a, b):
        p = (x.survivals + y.survivals) / (x.trials + y.trials)
        se = math.sqrt(p * (1 - p) * (1 / x.trials + 1 / y.trials))
        assert abs(x.rate - y.rate) <= 3 * se + 1e-12


def test_survival_counts_deterministic_and_worker_invariant(cat4):
    sched = make_schedule(6, 1 / 3, 1 / 3)
    deltas = [plant_candidate(cat4, 6, (1, 1), trial_rng(1, 0)), plant_candidate(cat4, 6, (0, 1), trial_rng(1, 1))]
    a = survival_counts(cat4, 6, sched, deltas, 200, seed=3, workers=1)
    b = survival_counts(cat4, 6, sched, deltas, 200, seed=3, workers=1)
    c = survival_counts(cat4, 6, sched, deltas, 200, seed=3, workers=2)
    assert a.tolist() == b.tolist() == c.tolist()


def test_drift_zero_candidate(cat4):
    res = drift_check(cat4, None, 6, ["z"] * 3 + ["x"] * 2, 50, seed=2, delta=0)
    assert all(r == 1.0 for r in res.rates)
    assert res.flat()


def test_drift_flat_small(cat4):
    res = drift_check(cat4, None, 8, ["z"] * 4, 3000, seed=6, degrees=(1, 1))
    assert res.rates[0] == pytest.approx(0.5, abs=0.05)
    assert res.flat()


def test_bell_exhaustive_matches_monte_carlo(bell):
    sched = ["z", "x"]
    deltas = list(range(1, 16))
    exact = exhaustive_survival(bell, 2, sched, deltas)
    mc = survival_counts(bell, 2, sched, deltas, 4000, seed=5) / 4000
    # family of 15 comparisons: Bonferroni threshold at a 0.1% family-wise level
    zmax = stats.norm.isf(0.001 / (2 * len(deltas)))
    for e, m in zip(exact, mc):
        assert abs(m - e) <= zmax * math.sqrt(e * (1 - e) / 4000)
    pool = [0, 3, 6, 9, 12]
    ex_mean, _ = mean_survivors(bell, 2, sched, pool)
    mc_mean, se = mean_survivors(bell, 2, sched, pool, trials=3000, seed=8)
    assert abs(ex_mean - mc_mean) <= 3 * se


def test_failure_trend_with_k(cat4):
    rates = [failure_rate(cat4, k, 0.25, 0.3, 300, seed=11) for k in (8, 12, 16, 20)]
    assert all(b <= a for a, b in zip(rates, rates[1:]))
    assert all(b < a for a, b in zip(rates, rates[1:]) if a > 0)
    assert rates[0] > rates[-1]


def test_binomial_z():
    assert binomial_z(50, 100, 0.5) == 0.0
    assert binomial_z(10, 10, 1.0) == 0.0
    assert binomial_z(9, 10, 1.0) == -math.inf
