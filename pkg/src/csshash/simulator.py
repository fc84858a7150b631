"""Desk-scale Monte Carlo model of the hashing protocol in the binary picture.

``k`` copies of an ``n``-qubit state are described by ``b~`` in ``Z_2^{nk}``
with the phase of generator ``j`` on copy ``i`` at bit ``j*k + i``.  All work
happens in the representation the permutation group is written in (see
:func:`csshash.yieldlp.working_mixture`).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .gf2 import BitMatrix, TooLarge, enumerate_symplectic
from .permcliff import (
    PermClifford,
    ThetaStructure,
    blind_subspace,
    build_theta_structure,
    candidate_degrees,
    r_orthogonal,
    sample_perm_clifford,
)
from .stabilizer import CssState, css_canonicalize, is_separable
from .permcliff import Separable
from .yieldlp import DiagonalMixture, coset_labels, working_mixture

MAX_EXHAUSTIVE_BITS = 24
MAX_PACKED_BITS = 62


class BadSchedule(ValueError):
    pass


class NoCandidate(ValueError):
    pass


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, split off a single 64-bit seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _parity(a: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(a) & 1).astype(np.int64)


def _to_lanes(values: Sequence[int], nbits: int) -> np.ndarray:
    """Python ints as rows of 32-bit lanes so arbitrary ``nk`` fits in numpy."""
    w = max(1, -(-nbits // 32))
    out = np.zeros((len(values), w), dtype=np.int64)
    for r, v in enumerate(values):
        for lane in range(w):
            out[r, lane] = (int(v) >> (32 * lane)) & 0xFFFFFFFF
    return out


def _lane_parity(lanes: np.ndarray, row: int) -> np.ndarray:
    acc = np.zeros(lanes.shape[0], dtype=np.int64)
    for lane in range(lanes.shape[1]):
        mask = (row >> (32 * lane)) & 0xFFFFFFFF
        if mask:
            acc ^= _parity(lanes[:, lane] & mask)
    return acc


@dataclass(frozen=True)
class SimConfig:
    k: int
    m_z: float
    m_x: float
    trials: int = 1000
    seed: int = 0
    mode: str = "overall"
    pool: str = "planted"
    decoys: int = 0
    workers: int = 1


# -- packing ------------------------------------------------------------------

def pack_symbols(symbols: np.ndarray, n: int, k: int) -> np.ndarray:
    """Per-copy symbols of shape ``(..., k)`` to packed ``b~`` integers."""
    symbols = np.asarray(symbols, dtype=np.int64)
    out = np.zeros(symbols.shape[:-1], dtype=np.int64)
    for i in range(k):
        a = symbols[..., i]
        for j in range(n):
            out |= ((a >> j) & 1) << (j * k + i)
    return out


def unpack_symbols(btilde: np.ndarray | int, n: int, k: int) -> np.ndarray:
    bt = np.asarray(btilde, dtype=np.int64)
    out = np.zeros(bt.shape + (k,), dtype=np.int64)
    for i in range(k):
        for j in range(n):
            out[..., i] |= ((bt >> (j * k + i)) & 1) << j
    return out


def pack_symbols_int(symbols: Sequence[int], n: int, k: int) -> int:
    """Arbitrary-size version of :func:`pack_symbols` for one sequence."""
    out = 0
    for i, a in enumerate(symbols):
        for j in range(n):
            if (int(a) >> j) & 1:
                out |= 1 << (j * k + i)
    return out


def sample_btilde(mix: DiagonalMixture, k: int, rng: np.random.Generator, size: int | None = None):
    """One packed ``b~`` (a Python int) or a list of ``size`` of them."""
    count = 1 if size is None else size
    symbols = rng.choice(1 << mix.n, size=(count, k), p=mix.p)
    packed = [pack_symbols_int(row, mix.n, k) for row in symbols.tolist()]
    return packed[0] if size is None else packed


# -- typical sets -------------------------------------------------------------

def _allowed_counts(p_a: float, k: int, epsilon: float) -> list[int]:
    return [c for c in range(k + 1) if abs(c / k - p_a) < epsilon]


def _profile_ok(counts: np.ndarray, p: np.ndarray, k: int, epsilon: float) -> np.ndarray:
    return (np.abs(counts / k - p) < epsilon).all(axis=-1)


def symbol_counts(symbols: np.ndarray, n: int) -> np.ndarray:
    symbols = np.asarray(symbols)
    out = np.zeros(symbols.shape[:-1] + (1 << n,), dtype=np.int64)
    for a in range(1 << n):
        out[..., a] = (symbols == a).sum(axis=-1)
    return out


@dataclass
class TypicalSet:
    """Strongly typical sequences; ``weights`` are sample multiplicities in sampling mode."""

    mix: DiagonalMixture
    k: int
    epsilon: float
    members: np.ndarray
    symbols: np.ndarray = field(repr=False)
    exhaustive: bool = True
    weights: np.ndarray | None = None
    mass: float = 0.0

    def __len__(self) -> int:
        return len(self.members)

    def contains(self, btilde: int) -> bool:
        syms = unpack_symbols(btilde, self.mix.n, self.k)
        counts = symbol_counts(syms, self.mix.n)
        return bool(_profile_ok(counts, self.mix.p, self.k, self.epsilon))

    def chebyshev_bound(self) -> float:
        """Upper bound on ``P(not typical)``: ``sum_a p(a)(1-p(a)) / (k eps^2)``."""
        p = self.mix.p
        return float((p * (1 - p)).sum() / (self.k * self.epsilon**2))


def build_typical_set(
    mix: DiagonalMixture,
    k: int,
    epsilon: float,
    sampling: bool = False,
    samples: int = 10_000,
    rng: np.random.Generator | None = None,
) -> TypicalSet:
    n = mix.n
    if k < 1 or epsilon <= 0:
        raise ValueError("need k >= 1 and epsilon > 0")
    if sampling:
        if rng is None:
            raise ValueError("sampling mode needs an rng")
        syms = rng.choice(1 << n, size=(samples, k), p=mix.p)
        ok = _profile_ok(symbol_counts(syms, n), mix.p, k, epsilon)
        weights: dict[int, int] = {}
        first: dict[int, np.ndarray] = {}
        for row in syms[ok]:
            b = pack_symbols_int(row.tolist(), n, k)
            weights[b] = weights.get(b, 0) + 1
            first.setdefault(b, row)
        keys = sorted(weights)
        members = np.array(keys, dtype=object)
        sym_arr = np.array([first[b] for b in keys]).reshape(len(keys), k)
        counts = np.array([weights[b] for b in keys], dtype=np.int64)
        return TypicalSet(mix, k, epsilon, members, sym_arr, False, counts, float(ok.mean()))
    if n * k > MAX_EXHAUSTIVE_BITS:
        raise TooLarge(f"exhaustive typical set refused for nk={n * k} > {MAX_EXHAUSTIVE_BITS}")
    mask = (1 << n) - 1
    total = 1 << (n * k)
    chunk = 1 << 18
    logp = np.log(np.where(mix.p > 0, mix.p, 1.0))
    keep_syms, mass = [], 0.0
    for start in range(0, total, chunk):
        t = np.arange(start, min(total, start + chunk), dtype=np.int64)
        syms = np.stack([(t >> (n * i)) & mask for i in range(k)], axis=-1)
        ok = _profile_ok(symbol_counts(syms, n), mix.p, k, epsilon)
        if not ok.any():
            continue
        s = syms[ok]
        zero = (mix.p[s] == 0).any(axis=-1)
        mass += float(np.exp(logp[s].sum(axis=-1))[~zero].sum())
        keep_syms.append(s)
    syms = np.concatenate(keep_syms) if keep_syms else np.zeros((0, k), dtype=np.int64)
    packed = pack_symbols(syms, n, k)
    order = np.argsort(packed)
    return TypicalSet(mix, k, epsilon, packed[order], syms[order], True, None, mass)


def _coset_factor(p: np.ndarray, coset: Sequence[int], K: int, k: int, eps: float) -> int:
    """Sum of multinomials over typical fillings of ``K`` slots with symbols of one coset."""
    allowed = [_allowed_counts(float(p[a]), k, eps) for a in coset]

    def rec(idx: int, left: int) -> int:
        if idx == len(coset) - 1:
            return 1 if left in allowed[idx] else 0
        acc = 0
        for c in allowed[idx]:
            if c > left:
                break
            sub = rec(idx + 1, left - c)
            if sub:
                acc += math.comb(left, c) * sub
        return acc

    return rec(0, K)


def count_matching(ts: TypicalSet, J: BitMatrix, u: int) -> tuple[int, int]:
    """Members whose per-copy ``J^⊥``-coset agrees with ``u``'s.

    Returns ``(enumerated, closed_form)``; the closed form sums products of
    multinomials over the typical frequency profiles, one factor per coset.
    """
    if not ts.exhaustive:
        raise TooLarge("count_matching needs an exhaustive typical set")
    n, k = ts.mix.n, ts.k
    labels = coset_labels(n, J)
    u_labels = labels[unpack_symbols(u, n, k)]
    enumerated = int((labels[ts.symbols] == u_labels).all(axis=-1).sum())
    groups: dict[int, list[int]] = {}
    for a, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(a)
    closed = 1
    for lab, coset in groups.items():
        K = int((u_labels == lab).sum())
        closed *= _coset_factor(ts.mix.p, coset, K, k, ts.epsilon)
        if not closed:
            break
    return enumerated, closed


# -- protocol -----------------------------------------------------------------

@dataclass(frozen=True)
class Setup:
    """A canonicalized state with its working mixture and theta structure."""

    css: CssState
    ts: ThetaStructure
    mix: DiagonalMixture

    @property
    def n(self) -> int:
        return self.ts.n

    @property
    def n_z(self) -> int:
        return self.ts.n_z

    @property
    def orthogonal(self) -> bool:
        return self.css.orthogonal

    def sample_pc(self, k: int, rng: np.random.Generator) -> PermClifford:
        return sample_perm_clifford(self.ts, self.orthogonal, k, rng)

    def degrees(self, k: int, delta: int) -> tuple[int, int]:
        return candidate_degrees(self.ts, self.orthogonal, k, delta)


def prepare(css: CssState, mix: DiagonalMixture) -> Setup:
    if not css.is_canonical:
        css = css_canonicalize(css)
    if is_separable(css)[0]:
        raise Separable("the protocol model needs a fully entangled state")
    if mix.n != css.n:
        raise ValueError("mixture and state sizes differ")
    return Setup(css, build_theta_structure(css.theta), working_mixture(css, mix))


def copy_counts(k: int, m_z: float, m_x: float) -> tuple[int, int]:
    if m_z < 0 or m_x < 0:
        raise BadSchedule("measured fractions must be non-negative")
    # round first so that e.g. (1/3)*12 is not pushed to 5 by float noise
    nz = math.ceil(round(m_z * k, 9))
    nx = math.ceil(round(m_x * k, 9))
    if nz + nx > k:
        raise BadSchedule(f"{nz} z-copies + {nx} x-copies exceed k = {k}")
    return nz, nx


def make_schedule(k: int, m_z: float, m_x: float) -> list[str]:
    nz, nx = copy_counts(k, m_z, m_x)
    return ["z"] * nz + ["x"] * nx


def _check_schedule(schedule: Sequence[str], k: int) -> None:
    if len(schedule) > k:
        raise BadSchedule("more measurements than copies")
    if any(s not in ("z", "x") for s in schedule):
        raise BadSchedule("schedule entries must be 'z' or 'x'")


def _basis_rows(n: int, n_z: int, basis: str) -> range:
    return range(n_z) if basis == "z" else range(n_z, n)


def _apply_RT(R: BitMatrix, v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    for r, row in enumerate(R.T.rows):
        out |= _parity(v & row) << r
    return out


def _drop_copy(v: np.ndarray, n: int, k: int, copy: int) -> np.ndarray:
    out = np.zeros_like(v)
    pos = 0
    for j in range(n):
        for i in range(k):
            if i == copy:
                continue
            out |= ((v >> (j * k + i)) & 1) << pos
            pos += 1
    return out


def eliminate(
    setup: Setup,
    k: int,
    schedule: Sequence[str],
    deltas: np.ndarray,
    rng: np.random.Generator,
    mode: str = "overall",
    pc: PermClifford | None = None,
) -> tuple[np.ndarray, list[np.ndarray], list[int]]:
    """Run the measurements on deviations ``Δb~`` from the truth.

    A pool member survives a step iff its revealed bits agree with the truth's,
    i.e. iff the revealed parities of its deviation vanish.  Returns the final
    survivor mask, the mask after each step and the revealed parities of the
    first row (for diagnostics).
    """
    _check_schedule(schedule, k)
    n, n_z = setup.n, setup.n_z
    deltas = [int(d) for d in deltas]
    alive = np.ones(len(deltas), dtype=bool)
    history = []
    if mode == "overall":
        if pc is None:
            pc = setup.sample_pc(k, rng)
        RT = pc.R.T
        lanes = _to_lanes(deltas, n * k)
        for copy, basis in enumerate(schedule):
            for j in _basis_rows(n, n_z, basis):
                alive &= _lane_parity(lanes, RT.row(j * k + copy)) == 0
            history.append(alive.copy())
    elif mode == "stepwise":
        if n * k > MAX_PACKED_BITS:
            raise TooLarge(f"stepwise mode needs nk <= {MAX_PACKED_BITS}")
        # second view: a fresh permutation on the remaining copies before each step
        v = np.array(deltas, dtype=np.int64)
        k_rem = k
        for basis in schedule:
            step_pc = setup.sample_pc(k_rem, rng)
            v = _apply_RT(step_pc.R, v)
            for j in _basis_rows(n, n_z, basis):
                alive &= ((v >> (j * k_rem)) & 1) == 0
            history.append(alive.copy())
            v = _drop_copy(v, n, k_rem, 0)
            k_rem -= 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return alive, history, [int(h.sum()) for h in history]


@dataclass
class ProtocolRun:
    truth: int
    pc: PermClifford | None
    schedule: list[str]
    revealed: list[int]
    survivors: list[int]
    success: bool


def run_protocol(
    css: CssState | Setup,
    mix: DiagonalMixture | None,
    k: int,
    m_z: float,
    m_x: float,
    candidate_pool: Iterable[int] | None,
    rng: np.random.Generator,
    mode: str = "overall",
    truth: int | None = None,
) -> ProtocolRun:
    """One protocol run.  ``candidate_pool=None`` means all of ``Z_2^{nk}``.

    A sampled truth is added to the pool; an explicit truth must already be in it.
    """
    setup = css if isinstance(css, Setup) else prepare(css, mix)
    n = setup.n
    schedule = make_schedule(k, m_z, m_x)
    if truth is None:
        truth = sample_btilde(setup.mix, k, rng)
        explicit = False
    else:
        explicit = True
    if candidate_pool is None:
        if n * k > MAX_EXHAUSTIVE_BITS:
            raise TooLarge(f"exhaustive pool refused for nk={n * k}")
        pool = np.arange(1 << (n * k), dtype=np.int64)
    else:
        pool = sorted(set(int(b) for b in candidate_pool))
        if truth not in pool:
            if explicit:
                raise ValueError("candidate pool must contain the truth")
            pool = sorted(pool + [truth])
        pool = np.array(pool, dtype=object)
    pc = setup.sample_pc(k, rng) if mode == "overall" else None
    alive, _, _ = eliminate(setup, k, schedule, [int(b) ^ truth for b in pool.tolist()], rng, mode, pc)
    survivors = [int(b) for b in pool[alive].tolist()]
    if truth not in survivors:  # pragma: no cover - would be a logic error
        raise AssertionError("the truth was eliminated")
    revealed = []
    if pc is not None:
        RT = pc.R.T
        for copy, basis in enumerate(schedule):
            for j in _basis_rows(n, setup.n_z, basis):
                revealed.append(bin(RT.row(j * k + copy) & truth).count("1") & 1)
    return ProtocolRun(truth, pc, schedule, revealed, survivors, survivors == [truth])


# -- planted candidates -------------------------------------------------------

def _random_combination(basis: Sequence[int], rng: np.random.Generator) -> int:
    v = 0
    for b in basis:
        if rng.integers(2):
            v ^= b
    return v


def plant_candidate(
    setup: Setup, k: int, degrees: tuple[int, int], rng: np.random.Generator, tries: int = 20_000
) -> int:
    """A deviation ``Δb~`` with the requested candidate degrees."""
    d_z, d_x = degrees
    n = setup.n
    if (d_z, d_x) == (0, 0):
        return 0
    pools = [None]
    for side, d in (("z", d_z), ("x", d_x)):
        if d == 0:
            blind = blind_subspace(setup.ts, setup.orthogonal, k, side).columns()
            if not blind:
                raise NoCandidate(f"no nonzero deviation is blind on the {side} side")
            pools = [blind]
    for _ in range(tries):
        if pools[0] is not None:
            delta = _random_combination(pools[0], rng)
        else:
            # a few single-copy deviations on distinct copies
            t = int(rng.integers(1, n + 2))
            copies = rng.choice(k, size=min(t, k), replace=False)
            delta = 0
            for i in copies:
                a = int(rng.integers(1, 1 << n))
                for j in range(n):
                    if (a >> j) & 1:
                        delta |= 1 << (j * k + int(i))
        if delta and setup.degrees(k, delta) == (d_z, d_x):
            return delta
    raise NoCandidate(f"no deviation with degrees {degrees} found in {tries} tries")


# -- survival statistics -------------------------------------------------------

@dataclass(frozen=True)
class SurvivalStat:
    d_z: int
    d_x: int
    trials: int
    survivals: int
    predicted: float
    z_score: float
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.survivals / self.trials if self.trials else float("nan")

    def within(self, sigmas: float = 3.0) -> bool:
        return abs(self.z_score) <= sigmas


def binomial_z(successes: int, trials: int, p: float) -> float:
    if trials == 0:
        return 0.0
    var = trials * p * (1 - p)
    diff = successes - trials * p
    if var == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / math.sqrt(var)


def _ci(successes: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    ci = stats.binomtest(successes, trials).proportion_ci(0.997)
    return float(ci.low), float(ci.high)


def _survival_chunk(args) -> np.ndarray:
    setup, k, schedule, deltas, seed, start, stop, mode = args
    counts = np.zeros(len(deltas), dtype=np.int64)
    deltas = list(deltas)
    for t in range(start, stop):
        alive, _, _ = eliminate(setup, k, schedule, deltas, trial_rng(seed, t), mode)
        counts += alive
    return counts


def _workers(requested: int | None) -> int:
    if requested:
        return max(1, requested)
    env = os.environ.get("CSSHASH_THREADS")
    return max(1, int(env)) if env else 1


def survival_counts(
    setup: Setup,
    k: int,
    schedule: Sequence[str],
    deltas: Sequence[int],
    trials: int,
    seed: int,
    mode: str = "overall",
    workers: int | None = None,
) -> np.ndarray:
    """Per-deviation survival counts; identical for any worker count."""
    deltas = [int(d) for d in deltas]
    w = _workers(workers)
    if w == 1 or trials < 2 * w:
        return _survival_chunk((setup, k, list(schedule), deltas, seed, 0, trials, mode))
    bounds = np.linspace(0, trials, w + 1).astype(int)
    jobs = [(setup, k, list(schedule), deltas, seed, a, b, mode) for a, b in zip(bounds, bounds[1:])]
    with ProcessPoolExecutor(max_workers=w) as ex:
        return sum(ex.map(_survival_chunk, jobs))


def survival_experiment(
    css: CssState | Setup,
    mix: DiagonalMixture | None,
    k: int,
    m_z: float,
    m_x: float,
    trials: int,
    seed: int = 0,
    degrees: Sequence[tuple[int, int]] = ((0, 0), (0, 1), (1, 1)),
    decoys: int = 0,
    mode: str = "overall",
    workers: int | None = None,
) -> list[SurvivalStat]:
    """Survival of planted (and optionally iid decoy) candidates, binned by degrees."""
    setup = css if isinstance(css, Setup) else prepare(css, mix)
    schedule = make_schedule(k, m_z, m_x)
    nz, nx = copy_counts(k, m_z, m_x)
    rng = trial_rng(seed, -1 % (1 << 63))
    deltas = [plant_candidate(setup, k, d, rng) for d in degrees]
    if decoys:
        truth = sample_btilde(setup.mix, k, rng)
        for b in sample_btilde(setup.mix, k, rng, size=decoys):
            if b != truth:
                deltas.append(b ^ truth)
    counts = survival_counts(setup, k, schedule, deltas, trials, seed, mode, workers)
    bins: dict[tuple[int, int], list[int]] = {}
    for delta, c in zip(deltas, counts.tolist()):
        bins.setdefault(setup.degrees(k, delta), []).append(c)
    out = []
    for (dz, dx), cs in sorted(bins.items()):
        n_trials = trials * len(cs)
        s = sum(cs)
        pred = 2.0 ** -(dz * nz + dx * nx)
        out.append(SurvivalStat(dz, dx, n_trials, s, pred, binomial_z(s, n_trials, pred), *_ci(s, n_trials)))
    return out


SURVIVAL_COLUMNS = ("d_z", "d_x", "trials", "survivals", "predicted", "z_score")


def survival_rows(stats_: Sequence[SurvivalStat]) -> list[tuple]:
    return [(s.d_z, s.d_x, s.trials, s.survivals, s.predicted, s.z_score) for s in stats_]


# -- drift --------------------------------------------------------------------

@dataclass
class DriftResult:
    schedule: list[str]
    alive: list[int]
    survived: list[int]
    expected: list[float]
    chi2: float
    p_value: float

    @property
    def rates(self) -> list[float]:
        return [s / a if a else float("nan") for a, s in zip(self.alive, self.survived)]

    def z_scores(self) -> list[float]:
        return [binomial_z(s, a, e) for a, s, e in zip(self.alive, self.survived, self.expected)]

    def flat(self, alpha: float = 0.01) -> bool:
        return self.p_value > alpha


def drift_check(
    css: CssState | Setup,
    mix: DiagonalMixture | None,
    k: int,
    schedule: Sequence[str],
    trials: int,
    seed: int = 0,
    delta: int | None = None,
    degrees: tuple[int, int] = (1, 0),
    basis: str = "z",
    mode: str = "overall",
) -> DriftResult:
    """Conditional survival rate of one planted candidate at every step.

    Flatness is tested with a chi-square contingency test over the steps
    measured in ``basis``.
    """
    setup = css if isinstance(css, Setup) else prepare(css, mix)
    schedule = list(schedule)
    _check_schedule(schedule, k)
    if delta is None:
        delta = plant_candidate(setup, k, degrees, trial_rng(seed, -1 % (1 << 63)))
    dz, dx = setup.degrees(k, delta)
    alive = np.zeros(len(schedule), dtype=np.int64)
    survived = np.zeros(len(schedule), dtype=np.int64)
    for t in range(trials):
        _, history, _ = eliminate(setup, k, schedule, [delta], trial_rng(seed, t), mode)
        before = True
        for step, mask in enumerate(history):
            if not before:
                break
            alive[step] += 1
            now = bool(mask[0])
            survived[step] += now
            before = now
    expected = [2.0 ** -(dz if b == "z" else dx) for b in schedule]
    rows = [
        [int(survived[s]), int(alive[s] - survived[s])]
        for s, b in enumerate(schedule)
        if b == basis and alive[s] > 0
    ]
    chi2, p = 0.0, 1.0
    table = np.array(rows)
    if len(rows) > 1 and (table.sum(axis=0) > 0).all():
        res = stats.chi2_contingency(table, correction=False)
        chi2, p = float(res.statistic), float(res.pvalue)
    return DriftResult(schedule, alive.tolist(), survived.tolist(), expected, chi2, p)


# -- exhaustive averages and trends --------------------------------------------

def orthogonal_perm_cliffords(setup: Setup, k: int) -> Iterable[PermClifford]:
    """Every permutation Clifford of an orthogonal-theta state (``|Sp(2k,2)|`` of them)."""
    if not setup.orthogonal:
        raise ValueError("exhaustive enumeration is only implemented for orthogonal theta")
    n = setup.n
    for M in enumerate_symplectic(k):
        A, B = M.block(0, k, 0, k), M.block(0, k, k, 2 * k)
        C, D = M.block(k, 2 * k, 0, k), M.block(k, 2 * k, k, 2 * k)
        yield PermClifford(k, (A,) * n, (B,) * n, (C,) * n, (D,) * n, r_orthogonal(setup.n_z, A, B, C, D), True)


def survival_matrix(setup: Setup, pcs: Iterable[PermClifford], k: int, schedule: Sequence[str], deltas: Sequence[int]) -> np.ndarray:
    """Survival indicator of every deviation (columns) under every ``pc`` (rows)."""
    return np.array([eliminate(setup, k, schedule, deltas, None, "overall", pc)[0] for pc in pcs])


def exhaustive_survival(setup: Setup, k: int, schedule: Sequence[str], deltas: Sequence[int]) -> np.ndarray:
    """Exact survival probability of each deviation, averaged over the whole group."""
    return survival_matrix(setup, orthogonal_perm_cliffords(setup, k), k, schedule, deltas).mean(axis=0)


def mean_survivors(
    setup: Setup, k: int, schedule: Sequence[str], pool_deltas: Sequence[int], trials: int | None = None, seed: int = 0
) -> tuple[float, float]:
    """Mean survivor count of a pool (given as deviations) and its standard error.

    ``trials=None`` averages exactly over the whole group (orthogonal theta
    only); otherwise permutations are sampled.
    """
    if trials is None:
        m = survival_matrix(setup, orthogonal_perm_cliffords(setup, k), k, schedule, pool_deltas)
        return float(m.sum(axis=1).mean()), 0.0
    pcs = (setup.sample_pc(k, trial_rng(seed, t)) for t in range(trials))
    counts = survival_matrix(setup, pcs, k, schedule, pool_deltas).sum(axis=1).astype(float)
    return float(counts.mean()), float(counts.std(ddof=1) / math.sqrt(trials))


def failure_rate(
    setup: Setup,
    k: int,
    m_z: float,
    m_x: float,
    trials: int,
    seed: int = 0,
    epsilon: float | None = None,
    decoys: int = 32,
) -> float:
    """Failure frequency of full runs against a pool of typical decoys.

    The pool is the truth plus ``decoys`` typical sequences (``epsilon``
    defaults to ``k^(-1/4)``); a run fails when the truth is atypical or any
    decoy survives.
    """
    eps = k ** -0.25 if epsilon is None else epsilon
    schedule = make_schedule(k, m_z, m_x)
    n = setup.n
    fails = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        syms = rng.choice(1 << n, size=(decoys + 1, k), p=setup.mix.p)
        ok = _profile_ok(symbol_counts(syms, n), setup.mix.p, k, eps)
        packed = [pack_symbols_int(row, n, k) for row in syms.tolist()]
        if not ok[0]:
            fails += 1
            continue
        truth = packed[0]
        pool = [b ^ truth for b, good in zip(packed[1:], ok[1:].tolist()) if good and b != truth]
        alive, _, _ = eliminate(setup, k, schedule, pool, rng)
        fails += bool(alive.any())
    return fails / trials
