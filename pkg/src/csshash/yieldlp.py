"""Coset entropies and the two-variable yield linear program.

Phase vectors ``b`` are indexed as integers with bit ``j`` holding ``b_{j+1}``:
the ``n_z`` z-phases first, then the ``n_x`` x-phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .gf2 import (
    BitMatrix,
    TooLarge,
    column_space_key,
    enumerate_subspaces,
    hstack,
    rank,
    vstack,
)
from .permcliff import Separable, ThetaStructure, build_theta_structure
from .stabilizer import CssState, css_canonicalize, is_separable

LP_TOL = 1e-9
MAX_MIXTURE_BITS = 20


class BadDimensions(ValueError):
    pass


class Infeasible(ValueError):
    pass


def _popcount_parity(a: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(a) & 1).astype(np.int64)


@dataclass(frozen=True)
class DiagonalMixture:
    """Probability ``p[b]`` of each S-basis state, ``b`` encoded as an int."""

    n: int
    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if self.n > MAX_MIXTURE_BITS:
            raise TooLarge(f"dense mixture refused for n={self.n}")
        if p.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} probabilities, got {p.shape}")
        if (p < 0).any():
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def point_mass(cls, n: int, b: int = 0) -> "DiagonalMixture":
        p = np.zeros(1 << n)
        p[b] = 1.0
        return cls(n, p)

    @classmethod
    def uniform(cls, n: int) -> "DiagonalMixture":
        return cls(n, np.full(1 << n, 1.0 / (1 << n)))

    def relabel(self, M: BitMatrix) -> "DiagonalMixture":
        """Distribution of ``M b`` for ``b ~ p`` (``M`` invertible ``n x n``)."""
        idx = np.arange(1 << self.n, dtype=np.int64)
        image = np.zeros_like(idx)
        for i, r in enumerate(M.rows):
            image |= _popcount_parity(idx & r) << i
        out = np.zeros(1 << self.n)
        np.add.at(out, image, self.p)
        return DiagonalMixture(self.n, out)


def entropy_of(probs) -> float:
    probs = np.asarray(probs, dtype=float)
    nz = probs[probs > 0]
    return max(0.0, float(-(nz * np.log2(nz)).sum()))


def entropy(mix: DiagonalMixture) -> float:
    return entropy_of(mix.p)


def marginal(mix: DiagonalMixture, bits: Sequence[int]) -> np.ndarray:
    bits = list(bits)
    idx = np.arange(1 << mix.n, dtype=np.int64)
    key = np.zeros_like(idx)
    for pos, b in enumerate(bits):
        if not 0 <= b < mix.n:
            raise IndexError(f"bit {b} out of range for n={mix.n}")
        key |= ((idx >> b) & 1) << pos
    return np.bincount(key, weights=mix.p, minlength=1 << len(bits))


def marginal_entropy(mix: DiagonalMixture, bits: Sequence[int]) -> float:
    return entropy_of(marginal(mix, bits))


def conditional_entropy(mix: DiagonalMixture, target: Sequence[int], given: Sequence[int]) -> float:
    joint = sorted(set(target) | set(given))
    return marginal_entropy(mix, joint) - marginal_entropy(mix, given)


# -- J matrices and coset entropies -------------------------------------------

def _rowwise_kron(a: BitMatrix, m: BitMatrix) -> BitMatrix:
    wa, wm = a.ncols, m.ncols
    rows = []
    for ra, rm in zip(a.rows, m.rows):
        acc = 0
        for s in range(wa):
            if (ra >> s) & 1:
                acc |= rm << (s * wm)
        rows.append(acc)
    return BitMatrix(rows, wa * wm)


def build_J(ts: ThetaStructure, orthogonal: bool, G_z: BitMatrix, G_x: BitMatrix) -> BitMatrix:
    n_z, n_x = ts.n_z, ts.n_x
    if G_z.nrows != n_z or G_x.nrows != n_x:
        raise BadDimensions("G_z must have n_z rows and G_x n_x rows")
    if rank(G_z) != G_z.ncols or rank(G_x) != G_x.ncols:
        raise BadDimensions("G_z and G_x must have full column rank")
    gz, gx = G_z.ncols, G_x.ncols
    if orthogonal:
        top = hstack([G_z, BitMatrix.zeros(n_z, gz), BitMatrix.zeros(n_z, gx), G_x])
        bottom = hstack([BitMatrix.zeros(n_x, gz), G_z, G_x, BitMatrix.zeros(n_x, gx)])
        return vstack([top, bottom])
    U = _rowwise_kron(ts.theta @ G_z, ts.M_theta)
    V = _rowwise_kron(ts.theta.T @ G_x, ts.M_thetaT)
    top = hstack([G_z, BitMatrix.zeros(n_z, U.ncols), BitMatrix.zeros(n_z, gx), V])
    bottom = hstack([BitMatrix.zeros(n_x, gz), U, G_x, BitMatrix.zeros(n_x, V.ncols)])
    return vstack([top, bottom])


_SYNDROME_CACHE: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}


def coset_labels(n: int, J: BitMatrix) -> np.ndarray:
    """Label of the coset of ``J^⊥ = {w : J^T w = 0}`` containing each ``b``."""
    if J.nrows != n:
        raise BadDimensions("J must have n rows")
    key = (n, column_space_key(J))
    labels = _SYNDROME_CACHE.get(key)
    if labels is None:
        idx = np.arange(1 << n, dtype=np.int64)
        labels = np.zeros_like(idx)
        for i, c in enumerate(key[1]):
            labels |= _popcount_parity(idx & c) << i
        labels.setflags(write=False)
        if len(_SYNDROME_CACHE) > 4096:
            _SYNDROME_CACHE.clear()
        _SYNDROME_CACHE[key] = labels
    return labels


def cosets(n: int, J: BitMatrix) -> list[list[int]]:
    """The cosets of ``J^⊥`` as sorted lists, the one containing 0 first."""
    labels = coset_labels(n, J)
    groups: dict[int, list[int]] = {}
    for b, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(b)
    return sorted(groups.values(), key=lambda g: (0 not in g, g))


def coset_entropy(mix: DiagonalMixture, J: BitMatrix) -> float:
    labels = coset_labels(mix.n, J)
    return entropy_of(np.bincount(labels, weights=mix.p))


def H_dd(
    mix: DiagonalMixture, ts: ThetaStructure, orthogonal: bool, d_z: int, d_x: int
) -> tuple[float, tuple[BitMatrix, BitMatrix]]:
    """Minimum coset entropy over subspaces of co-dimensions ``(d_z, d_x)``."""
    n_z, n_x = ts.n_z, ts.n_x
    if not (0 <= d_z <= n_z and 0 <= d_x <= n_x):
        raise ValueError(f"degrees ({d_z},{d_x}) outside the grid")
    if mix.n != ts.n:
        raise BadDimensions("mixture and state sizes differ")
    best = math.inf
    witness = None
    seen: dict[tuple[int, ...], float] = {}
    gx_list = list(enumerate_subspaces(n_x, n_x - d_x))
    for G_z in enumerate_subspaces(n_z, n_z - d_z):
        for G_x in gx_list:
            J = build_J(ts, orthogonal, G_z, G_x)
            key = column_space_key(J)
            h = seen.get(key)
            if h is None:
                h = seen[key] = coset_entropy(mix, J)
            if h < best - 1e-15:
                best, witness = h, (G_z, G_x)
    return best, witness


def H_table(
    mix: DiagonalMixture, ts: ThetaStructure, orthogonal: bool
) -> tuple[dict[tuple[int, int], float], dict[tuple[int, int], tuple[BitMatrix, BitMatrix]]]:
    table, witnesses = {}, {}
    for d_z in range(ts.n_z + 1):
        for d_x in range(ts.n_x + 1):
            if (d_z, d_x) == (0, 0):
                continue
            table[(d_z, d_x)], witnesses[(d_z, d_x)] = H_dd(mix, ts, orthogonal, d_z, d_x)
    return table, witnesses


# -- the linear program -------------------------------------------------------

def lp_rows(H: float, table: Mapping[tuple[int, int], float]) -> list[tuple[int, int, float]]:
    """Constraints ``d_z m_z + d_x m_x >= H - H_[d_z,d_x]`` as ``(d_z, d_x, rhs)``."""
    return [(dz, dx, H - h) for (dz, dx), h in sorted(table.items()) if (dz, dx) != (0, 0)]


def lp_solve(H: float, table: Mapping[tuple[int, int], float]) -> tuple[float, float]:
    """Exact optimum of the yield LP by vertex enumeration."""
    rows = lp_rows(H, table) + [(1, 0, 0.0), (0, 1, 0.0)]
    lines = sorted(set((a, b, round(c, 15)) for a, b, c in rows))
    vertices = []
    for i in range(len(lines)):
        a1, b1, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            a2, b2, c2 = lines[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            mz = (c1 * b2 - c2 * b1) / det
            mx = (a1 * c2 - a2 * c1) / det
            if all(a * mz + b * mx >= c - LP_TOL for a, b, c in rows):
                vertices.append((mz, mx))
    if not vertices:
        raise Infeasible("no feasible vertex")
    best = min(mz + mx for mz, mx in vertices)
    mz, mx = min(v for v in vertices if v[0] + v[1] <= best + 1e-12)
    return max(mz, 0.0), max(mx, 0.0)


def active_constraints(H: float, table, m_z: float, m_x: float) -> list[tuple[int, int]]:
    return [(dz, dx) for dz, dx, c in lp_rows(H, table) if abs(dz * m_z + dx * m_x - c) <= LP_TOL]


def lp_constraint_text(H: float, table: Mapping[tuple[int, int], float], tol: float = 1e-12) -> list[str]:
    """Human-readable constraint list with trivial right-hand sides simplified.

    Rows whose ``H_[d_z,d_x]`` equals ``H`` read ``... >= 0`` and single-variable
    ones are normalised to ``m_z >= 0`` / ``m_x >= 0``; rows with
    ``H_[d_z,d_x] = 0`` read ``... >= H``.  Duplicates are dropped.
    """

    def term(c: int, name: str) -> str:
        return name if c == 1 else f"{c}{name}"

    out: list[str] = []
    for (dz, dx), h in sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if abs(h - H) <= tol:
            rhs = "0"
        elif abs(h) <= tol:
            rhs = "H"
        else:
            rhs = f"H - H[{dz},{dx}]"
        if rhs == "0" and (dz == 0 or dx == 0):
            dz, dx = min(dz, 1), min(dx, 1)
        parts = [term(dz, "m_z")] if dz else []
        if dx:
            parts.append(term(dx, "m_x"))
        line = f"{' + '.join(parts)} >= {rhs}"
        if line not in out:
            out.append(line)
    return out


@dataclass
class YieldResult:
    H: float
    table: dict[tuple[int, int], float]
    witnesses: dict[tuple[int, int], tuple[BitMatrix, BitMatrix]]
    m_z: float
    m_x: float
    gamma: float
    active_constraints: list[tuple[int, int]]
    n_z: int
    n_x: int

    def constraint_text(self) -> list[str]:
        return lp_constraint_text(self.H, self.table)


def working_mixture(css: CssState, mix: DiagonalMixture) -> DiagonalMixture:
    """Re-express a mixture given in the basis of ``css`` before canonicalization.

    The result is indexed in the canonical generator basis, or for orthogonal
    ``theta`` in the ``S_x = S_z`` basis, where ``b_x -> theta^T b_x``.
    """
    n_z, n_x = css.n_z, css.n_x
    if css.gen_change is not None:
        Rz, Rx = css.gen_change
        M = BitMatrix(
            [r for r in Rz.T.rows] + [r << n_z for r in Rx.T.rows], n_z + n_x
        )
        mix = mix.relabel(M)
    if css.orthogonal:
        M = BitMatrix(
            [1 << i for i in range(n_z)] + [r << n_z for r in css.theta.T.rows], n_z + n_x
        )
        mix = mix.relabel(M)
    return mix


def compute_yield(css: CssState, mix: DiagonalMixture) -> YieldResult:
    """Asymptotic hashing yield for ``k`` copies of ``mix`` on the state ``css``."""
    if mix.n != css.n:
        raise BadDimensions("mixture and state sizes differ")
    if not css.is_canonical:
        css = css_canonicalize(css)
    if is_separable(css)[0]:
        raise Separable("yield is defined for fully entangled states only")
    work = working_mixture(css, mix)
    ts = build_theta_structure(css.theta)
    H = entropy(work)
    table, witnesses = H_table(work, ts, css.orthogonal)
    m_z, m_x = lp_solve(H, table)
    gamma = min(1.0, max(0.0, 1.0 - m_z - m_x))
    return YieldResult(
        H, table, witnesses, m_z, m_x, gamma, active_constraints(H, table, m_z, m_x), ts.n_z, ts.n_x
    )


# -- baselines ----------------------------------------------------------------

def baseline_yields(mix: DiagonalMixture) -> tuple[float, float]:
    """``(yield_man, yield_lo)`` for the 4-qubit cat state (unclamped).

    Bits 0..2 are the z-phases ``b_1..b_3``, bit 3 the x-phase ``b_4``.
    """
    if mix.n != 4:
        raise BadDimensions("baselines are defined for the 4-qubit cat state")
    z = (0, 1, 2)
    h4 = marginal_entropy(mix, [3])
    max_hz = max(marginal_entropy(mix, [j]) for j in z)
    y_man = 1.0 - max_hz - h4
    y_lo = max(
        1.0 - max_hz - conditional_entropy(mix, [3], z),
        1.0 - max(conditional_entropy(mix, [j], [3]) for j in z) - h4,
    )
    return y_man, y_lo


def cnot_only_yield_8q(mix: DiagonalMixture) -> float:
    if mix.n != 8:
        raise BadDimensions("expected the 8-qubit example mixture")
    H = entropy(mix)
    hx = marginal_entropy(mix, [4, 5, 6, 7])
    return 1.0 - hx / 4.0 - (H - hx) / 3.0
