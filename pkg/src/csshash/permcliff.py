"""Local Clifford operations that permute k-fold products of a CSS state.

All parties hold one qubit of each of ``k`` copies.  A local Clifford is one
``2k x 2k`` symplectic block per party; it permutes the ``2^{nk}`` product
basis states iff ``C_full (S ⊗ I_k) R = S ⊗ I_k`` for some invertible ``R``,
and the phases then move as ``b~ -> R^T b~``.

Two regimes:

* ``theta`` orthogonal: the state is written with ``S_x = S_z`` and every
  party applies the same uniformly random symplectic block.
* otherwise: ``D = A^{-T}``, ``B_i = A X_i`` and ``C_i = A^{-T} Y_i`` with
  symmetric ``X_i, Y_i`` whose entry tuples ``(X_1[s,t], ..., X_n[s,t])``
  lie in ``ker(constraint_B)`` (resp. ``ker(constraint_C)``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    _bits,
    _rref_rows,
    block_diag,
    block_matrix,
    enumerate_symplectic,
    hstack,
    invert,
    is_invertible,
    is_symplectic,
    kernel_basis,
    kron,
    parity,
    random_bits,
    rank_of_ints,
    sample_invertible,
    sample_symplectic,
    vstack,
)
from .stabilizer import CssState, copies_per_party, is_separable


class NotPermutation(ValueError):
    pass


class NotSymplectic(ValueError):
    pass


class Separable(ValueError):
    pass


def _pair_products(cols: Sequence[int], nbits: int) -> BitMatrix:
    """Column basis of ``{c_j ⊙ c_l : j < l}`` as an ``nbits x r`` matrix."""
    prods = [cols[j] & cols[l] for j, l in itertools.combinations(range(len(cols)), 2)]
    basis, _ = _rref_rows(prods, nbits)
    if not basis:
        return BitMatrix.zeros(nbits, 0)
    return BitMatrix.from_columns(basis, nbits)


@dataclass(frozen=True)
class ThetaStructure:
    theta: BitMatrix
    L_theta: BitMatrix
    L_thetaT: BitMatrix
    M_theta: BitMatrix
    M_thetaT: BitMatrix
    constraint_B: BitMatrix
    constraint_C: BitMatrix

    @property
    def n_x(self) -> int:
        return self.theta.nrows

    @property
    def n_z(self) -> int:
        return self.theta.ncols

    @property
    def n(self) -> int:
        return self.n_x + self.n_z


def build_theta_structure(theta: BitMatrix) -> ThetaStructure:
    n_x, n_z = theta.shape
    L_theta = _pair_products(theta.columns(), n_x)
    L_thetaT = _pair_products(theta.T.columns(), n_z)
    M_theta = kernel_basis(L_theta.T)
    M_thetaT = kernel_basis(L_thetaT.T)
    constraint_B = block_matrix(
        [
            [theta, BitMatrix.identity(n_x)],
            [L_thetaT.T, BitMatrix.zeros(L_thetaT.ncols, n_x)],
        ]
    )
    constraint_C = block_matrix(
        [
            [BitMatrix.identity(n_z), theta.T],
            [BitMatrix.zeros(L_theta.ncols, n_z), L_theta.T],
        ]
    )
    return ThetaStructure(theta, L_theta, L_thetaT, M_theta, M_thetaT, constraint_B, constraint_C)


def working_stabilizer(css: CssState) -> BitMatrix:
    """``S`` in the representation the permutation group is written in.

    Orthogonal ``theta`` uses ``S_x = S_z``; everything else the canonical form.
    """
    if css.orthogonal:
        return block_diag([css.S_z, css.S_z])
    return css.S


@dataclass(frozen=True)
class PermClifford:
    k: int
    A_blocks: tuple[BitMatrix, ...]
    B_blocks: tuple[BitMatrix, ...]
    C_blocks: tuple[BitMatrix, ...]
    D_blocks: tuple[BitMatrix, ...]
    R: BitMatrix
    orthogonal: bool = False

    @property
    def n(self) -> int:
        return len(self.A_blocks)

    @property
    def A(self) -> BitMatrix:
        return self.A_blocks[0]

    @property
    def D(self) -> BitMatrix:
        return self.D_blocks[0]

    def party_block(self, i: int) -> BitMatrix:
        return block_matrix(
            [[self.A_blocks[i], self.B_blocks[i]], [self.C_blocks[i], self.D_blocks[i]]]
        )

    def full_clifford(self) -> BitMatrix:
        return block_matrix(
            [
                [block_diag(self.A_blocks), block_diag(self.B_blocks)],
                [block_diag(self.C_blocks), block_diag(self.D_blocks)],
            ]
        )

    def key(self) -> tuple:
        return (self.A_blocks, self.B_blocks, self.C_blocks, self.D_blocks)


def identity_perm_clifford(n: int, k: int, orthogonal: bool = False) -> PermClifford:
    eye, zero = BitMatrix.identity(k), BitMatrix.zeros(k, k)
    return PermClifford(
        k, (eye,) * n, (zero,) * n, (zero,) * n, (eye,) * n, BitMatrix.identity(n * k), orthogonal
    )


def _symmetric_blocks(kernel: BitMatrix, n: int, k: int, rng: np.random.Generator) -> list[BitMatrix]:
    """``n`` symmetric ``k x k`` matrices whose entry tuples are uniform in ``col(kernel)``."""
    rows = [[0] * k for _ in range(n)]
    kcols = kernel.columns()
    dim = len(kcols)
    for s in range(k):
        for t in range(s, k):
            coeffs = random_bits(rng, dim)
            v = 0
            for j in _bits(coeffs):
                v ^= kcols[j]
            for i in _bits(v):
                rows[i][s] |= 1 << t
                rows[i][t] |= 1 << s
    return [BitMatrix(r, k) for r in rows]


def r_nonorthogonal(
    ts: ThetaStructure, A: BitMatrix, B_blocks: Sequence[BitMatrix], C_blocks: Sequence[BitMatrix]
) -> BitMatrix:
    k = A.nrows
    n_z = ts.n_z
    eye_k = BitMatrix.identity(k)
    Bz_T = block_diag([B.T for B in B_blocks[:n_z]])
    Cx_T = block_diag([C.T for C in C_blocks[n_z:]])
    return block_matrix(
        [
            [kron(BitMatrix.identity(n_z), invert(A)), Bz_T @ kron(ts.theta.T, eye_k)],
            [Cx_T @ kron(ts.theta, eye_k), kron(BitMatrix.identity(ts.n_x), A.T)],
        ]
    )


def r_orthogonal(n_half: int, A: BitMatrix, B: BitMatrix, C: BitMatrix, D: BitMatrix) -> BitMatrix:
    eye = BitMatrix.identity(n_half)
    return block_matrix(
        [[kron(eye, D.T), kron(eye, B.T)], [kron(eye, C.T), kron(eye, A.T)]]
    )


def sample_perm_clifford(
    ts: ThetaStructure, orthogonal: bool, k: int, rng: np.random.Generator
) -> PermClifford:
    """Uniform sample from the local Cliffords that permute ``k``-fold products."""
    if k < 1:
        raise ValueError("k must be positive")
    n = ts.n
    if orthogonal:
        M = sample_symplectic(k, rng)
        A, B = M.block(0, k, 0, k), M.block(0, k, k, 2 * k)
        C, D = M.block(k, 2 * k, 0, k), M.block(k, 2 * k, k, 2 * k)
        R = r_orthogonal(ts.n_z, A, B, C, D)
        return PermClifford(k, (A,) * n, (B,) * n, (C,) * n, (D,) * n, R, True)
    A = sample_invertible(k, rng)
    AinvT = invert(A).T
    X = _symmetric_blocks(kernel_basis(ts.constraint_B), n, k, rng)
    Y = _symmetric_blocks(kernel_basis(ts.constraint_C), n, k, rng)
    B_blocks = tuple(A @ x for x in X)
    C_blocks = tuple(AinvT @ y for y in Y)
    R = r_nonorthogonal(ts, A, B_blocks, C_blocks)
    return PermClifford(k, (A,) * n, B_blocks, C_blocks, (AinvT,) * n, R, False)


def sampler_for(css: CssState):
    """Validate ``css`` once and return ``(ThetaStructure, sample(k, rng))``."""
    if not css.is_canonical:
        raise ValueError("state must be canonicalized first")
    separable, _ = is_separable(css)
    if separable:
        raise Separable("the permutation group is only derived for fully entangled states")
    ts = build_theta_structure(css.theta)

    def sample(k: int, rng: np.random.Generator) -> PermClifford:
        return sample_perm_clifford(ts, css.orthogonal, k, rng)

    return ts, sample


def verify_permutation(pc: PermClifford, css: CssState) -> None:
    """Raise unless every party block is symplectic and ``C (S⊗I) R = S⊗I``."""
    for i in range(pc.n):
        if not is_symplectic(pc.party_block(i)):
            raise NotSymplectic(f"party {i} block is not symplectic")
    if not is_invertible(pc.R):
        raise NotPermutation("R is singular")
    St = copies_per_party(working_stabilizer(css), pc.k)
    if pc.full_clifford() @ St @ pc.R != St:
        raise NotPermutation("C_full (S ⊗ I_k) R != S ⊗ I_k")


def permutes_products(full_clifford: BitMatrix, css: CssState, k: int) -> bool:
    """Independent check: ``C (S⊗I)`` spans the same column space as ``S⊗I``."""
    St = copies_per_party(working_stabilizer(css), k)
    CS = full_clifford @ St
    return rank_of_ints(hstack([St, CS]).T.rows) == St.ncols and rank_of_ints(
        CS.T.rows
    ) == St.ncols


def enumerate_valid_k1(css: CssState) -> set[tuple]:
    """All local Cliffords at ``k = 1`` that permute the ``2^n`` basis states.

    Brute force over ``Sp(2,2)^n`` with the column-space check, independent
    of the constraint equations used by the sampler.
    """
    blocks = list(enumerate_symplectic(1))
    n = css.n
    found = set()
    for combo in itertools.product(blocks, repeat=n):
        A = tuple(m.block(0, 1, 0, 1) for m in combo)
        B = tuple(m.block(0, 1, 1, 2) for m in combo)
        C = tuple(m.block(1, 2, 0, 1) for m in combo)
        D = tuple(m.block(1, 2, 1, 2) for m in combo)
        full = block_matrix([[block_diag(A), block_diag(B)], [block_diag(C), block_diag(D)]])
        if permutes_products(full, css, 1):
            found.add((A, B, C, D))
    return found


def compose(pc1: PermClifford, pc2: PermClifford) -> PermClifford:
    """``pc1`` after ``pc2``."""
    k = pc1.k
    blocks = [pc1.party_block(i) @ pc2.party_block(i) for i in range(pc1.n)]
    split = [
        tuple(m.block(r0, r0 + k, c0, c0 + k) for m in blocks)
        for r0, c0 in ((0, 0), (0, k), (k, 0), (k, k))
    ]
    return PermClifford(k, *split, pc2.R @ pc1.R, pc1.orthogonal)


def apply_perm(pc: PermClifford, btilde: BitVector) -> BitVector:
    return pc.R.T @ btilde


# -- candidate degrees --------------------------------------------------------

def _segments(delta: int, k: int, count: int, offset: int = 0) -> list[int]:
    mask = (1 << k) - 1
    return [(delta >> ((offset + j) * k)) & mask for j in range(count)]


def _images(ts: ThetaStructure, orthogonal: bool, k: int, delta: int) -> tuple[list[int], list[int]]:
    """Images of the unit vectors under the z- and x-blindness maps."""
    n_z, n_x = ts.n_z, ts.n_x
    dz = _segments(delta, k, n_z)
    dx = _segments(delta, k, n_x, n_z)
    if orthogonal:
        imgs = [dz[j] | (dx[j] << k) for j in range(n_z)]
        return imgs, list(imgs)
    th = ts.theta
    M, MT = ts.M_theta, ts.M_thetaT
    z_imgs = []
    for j in range(n_z):
        img = dz[j]
        for t in range(M.ncols):
            acc = 0
            for l in range(n_x):
                if th[l, j] and M[l, t]:
                    acc ^= dx[l]
            img |= acc << (k * (t + 1))
        z_imgs.append(img)
    x_imgs = []
    for l in range(n_x):
        img = dx[l]
        for t in range(MT.ncols):
            acc = 0
            for j in range(n_z):
                if th[l, j] and MT[j, t]:
                    acc ^= dz[j]
            img |= acc << (k * (t + 1))
        x_imgs.append(img)
    return z_imgs, x_imgs


def candidate_degrees(
    ts: ThetaStructure, orthogonal: bool, k: int, delta_btilde: BitVector | int
) -> tuple[int, int]:
    """Dimensions ``(d_z, d_x)`` of the outcome-difference spaces of ``Δb~``.

    ``d_z`` is ``n_z`` minus the dimension of the g's that are blind to the
    deviation; a candidate survives one z-measured copy with probability
    ``2^-d_z``.
    """
    delta = delta_btilde.bits if isinstance(delta_btilde, BitVector) else int(delta_btilde)
    if isinstance(delta_btilde, BitVector) and len(delta_btilde) != ts.n * k:
        raise ValueError("deviation must have length n*k")
    z_imgs, x_imgs = _images(ts, orthogonal, k, delta)
    return rank_of_ints(z_imgs), rank_of_ints(x_imgs)


def blind_subspace(ts: ThetaStructure, orthogonal: bool, k: int, side: str) -> BitMatrix:
    """Basis (columns) of all ``Δb~`` with ``d_side = 0``."""
    nk = ts.n * k
    rows = []
    for pos in range(nk):
        z_imgs, x_imgs = _images(ts, orthogonal, k, 1 << pos)
        rows.append(z_imgs if side == "z" else x_imgs)
    # each image coordinate is a linear functional of Δ; stack them as rows
    width = max((img.bit_length() for r in rows for img in r), default=0)
    functionals = []
    count = len(rows[0]) if rows else 0
    for g in range(count):
        for bit in range(width):
            f = 0
            for pos in range(nk):
                if (rows[pos][g] >> bit) & 1:
                    f |= 1 << pos
            if f:
                functionals.append(f)
    if not functionals:
        return BitMatrix.identity(nk)
    return kernel_basis(BitMatrix(functionals, nk))


def revealed_columns(pc: PermClifford, n_z: int, copy: int, basis: str) -> list[int]:
    """Columns of ``R`` (packed) read out when ``copy`` is measured in ``basis``."""
    k = pc.k
    n = pc.n
    js = range(n_z) if basis == "z" else range(n_z, n)
    RT = pc.R.T
    return [RT.row(j * k + copy) for j in js]


def survives(pc: PermClifford, n_z: int, delta: int, copy: int, basis: str) -> bool:
    return all(not parity(c & delta) for c in revealed_columns(pc, n_z, copy, basis))
