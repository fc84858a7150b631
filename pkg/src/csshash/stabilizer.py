"""Stabilizer and CSS states in the binary picture.

A stabilizer state on ``n`` qubits is a ``2n x n`` matrix ``S`` (z-part in
the first ``n`` rows, x-part in the last ``n``) plus a phase vector ``b``.
Clifford phases are not tracked: we always assume the Pauli correction that
keeps ``b`` fixed under ``S -> C S`` and ``S -> S R`` has been applied.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

from .gf2 import (
    BitMatrix,
    BitVector,
    SingularMatrix,
    TooLarge,
    block_diag,
    invert,
    is_invertible,
    is_symplectic,
    kernel_basis,
    kron,
    rank,
    symplectic_form,
    vstack,
)


class NotFullRank(ValueError):
    pass


class NotCommuting(ValueError):
    pass


class NotCss(ValueError):
    pass


class BadPartition(ValueError):
    pass


MAX_SEPARABILITY_N = 12


@dataclass(frozen=True)
class StabilizerState:
    S: BitMatrix
    b: BitVector

    @property
    def n(self) -> int:
        return self.S.ncols

    def __post_init__(self):
        if self.S.nrows != 2 * self.S.ncols:
            raise ValueError(f"S must be 2n x n, got {self.S.shape}")
        if len(self.b) != self.S.ncols:
            raise ValueError("b must have length n")


@dataclass(frozen=True)
class CliffordOp:
    C: BitMatrix

    @property
    def n(self) -> int:
        return self.C.nrows // 2

    def __post_init__(self):
        if not is_symplectic(self.C):
            raise ValueError("Clifford matrix is not symplectic")


@dataclass(frozen=True)
class CssState:
    """CSS state with ``S = [[S_z, 0], [0, S_x]]``.

    After :func:`css_canonicalize` the state carries ``theta`` with
    ``S_z = [I; theta]`` and ``S_x = [theta^T; I]`` on the qubits reordered by
    ``qubit_perm`` (``qubit_perm[i]`` is the original index of new qubit
    ``i``), and ``gen_change = (R_z, R_x)`` maps the original phase bits to the
    canonical ones via ``b_z -> R_z^T b_z``, ``b_x -> R_x^T b_x``.
    """

    S_z: BitMatrix
    S_x: BitMatrix
    b: BitVector | None = None
    theta: BitMatrix | None = None
    qubit_perm: tuple[int, ...] | None = None
    orthogonal: bool = False
    gen_change: tuple[BitMatrix, BitMatrix] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.S_z.nrows != self.S_x.nrows:
            raise ValueError("S_z and S_x must have the same number of rows (qubits)")
        if self.S_z.ncols + self.S_x.ncols != self.S_z.nrows:
            raise ValueError("n_z + n_x must equal n")
        if self.b is None:
            object.__setattr__(self, "b", BitVector.zeros(self.n))
        elif len(self.b) != self.n:
            raise ValueError("b must have length n")

    @property
    def n(self) -> int:
        return self.S_z.nrows

    @property
    def n_z(self) -> int:
        return self.S_z.ncols

    @property
    def n_x(self) -> int:
        return self.S_x.ncols

    @property
    def is_canonical(self) -> bool:
        return self.theta is not None

    @property
    def S(self) -> BitMatrix:
        return block_diag([self.S_z, self.S_x])

    def as_stabilizer(self) -> StabilizerState:
        return StabilizerState(self.S, self.b)


def P_matrix(n: int) -> BitMatrix:
    return symplectic_form(n)


def validate_stabilizer(S: BitMatrix) -> None:
    """Raise unless ``S`` has full column rank and ``S^T P S = 0``."""
    if S.nrows != 2 * S.ncols:
        raise ValueError(f"S must be 2n x n, got {S.shape}")
    n = S.ncols
    if rank(S) != n:
        raise NotFullRank(f"rank(S) = {rank(S)} < n = {n}: generators are dependent")
    if not (S.T @ P_matrix(n) @ S).is_zero():
        raise NotCommuting("S^T P S != 0: generators do not commute")


def tensor(s1: StabilizerState, s2: StabilizerState) -> StabilizerState:
    n1, n2 = s1.n, s2.n
    z1, x1 = s1.S.block(0, n1, 0, n1), s1.S.block(n1, 2 * n1, 0, n1)
    z2, x2 = s2.S.block(0, n2, 0, n2), s2.S.block(n2, 2 * n2, 0, n2)
    S = vstack([block_diag([z1, z2]), block_diag([x1, x2])])
    b = BitVector(s1.b.bits | (s2.b.bits << n1), n1 + n2)
    return StabilizerState(S, b)


def copies_per_party(S: BitMatrix, k: int) -> BitMatrix:
    """``S ⊗ I_k``: ``k`` copies with qubits grouped per party.

    Row ``(q, i)`` sits at ``q*k + i`` inside each of the z/x halves and the
    phase of generator ``j`` on copy ``i`` at ``j*k + i``.
    """
    return kron(S, BitMatrix.identity(k))


def apply_clifford(q: CliffordOp, s: StabilizerState) -> StabilizerState:
    if q.C.ncols != s.S.nrows:
        raise ValueError("dimension mismatch between Clifford and state")
    return StabilizerState(q.C @ s.S, s.b)


def change_generators(s: StabilizerState, R: BitMatrix) -> StabilizerState:
    if not is_invertible(R):
        raise SingularMatrix("generator change R must be invertible")
    return StabilizerState(s.S @ R, R.T @ s.b)


def _admissible(S_z: BitMatrix, perm: Sequence[int]) -> bool:
    return is_invertible(S_z.select_rows(perm[: S_z.ncols]))


def admissible_permutations(css: CssState) -> list[tuple[int, ...]]:
    """Every qubit ordering whose leading ``n_z`` rows of ``S_z`` are independent."""
    return [p for p in itertools.permutations(range(css.n)) if _admissible(css.S_z, p)]


def _greedy_permutation(S_z: BitMatrix) -> tuple[int, ...]:
    chosen: list[int] = []
    for i in range(S_z.nrows):
        if rank(S_z.select_rows(chosen + [i])) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == S_z.ncols:
            break
    rest = [i for i in range(S_z.nrows) if i not in chosen]
    return tuple(chosen + rest)


def check_css(css: CssState) -> None:
    if not (css.S_z.T @ css.S_x).is_zero():
        raise NotCss("S_z^T S_x != 0")
    if rank(css.S_z) != css.n_z:
        raise NotFullRank("S_z is not full rank")
    if rank(css.S_x) != css.n_x:
        raise NotFullRank("S_x is not full rank")


def css_canonicalize(css: CssState, qubit_perm: Sequence[int] | None = None) -> CssState:
    """Bring a CSS state to the form ``S_z = [I; theta]``, ``S_x = [theta^T; I]``.

    Qubits are reordered when the leading block of ``S_z`` is singular; by
    default the lexicographically smallest admissible ordering is used.
    """
    check_css(css)
    n, n_z = css.n, css.n_z
    if qubit_perm is None:
        perm = _greedy_permutation(css.S_z)
    else:
        perm = tuple(qubit_perm)
        if sorted(perm) != list(range(n)) or not _admissible(css.S_z, perm):
            raise ValueError(f"qubit permutation {perm} is not admissible")
    # compose with any earlier canonicalization so qubit_perm refers to the input
    Sz = css.S_z.select_rows(perm)
    Sx = css.S_x.select_rows(perm)
    Rz = invert(Sz.block(0, n_z, 0, n_z))
    Rx = invert(Sx.block(n_z, n, 0, css.n_x))
    Sz2 = Sz @ Rz
    Sx2 = Sx @ Rx
    theta = Sz2.block(n_z, n, 0, n_z)
    expected_x = vstack([theta.T, BitMatrix.identity(css.n_x)])
    if Sx2 != expected_x:  # pragma: no cover - guaranteed by S_z^T S_x = 0
        raise NotCss("S_x does not match the canonical form implied by S_z")
    bz = BitVector(css.b.bits, n_z)
    bx = BitVector(css.b.bits >> n_z, css.n_x)
    bz2, bx2 = Rz.T @ bz, Rx.T @ bx
    b2 = BitVector(bz2.bits | (bx2.bits << n_z), n)
    orth = is_orthogonal(theta)
    if css.qubit_perm is not None:
        perm = tuple(css.qubit_perm[p] for p in perm)
    if css.gen_change is not None:
        Rz = css.gen_change[0] @ Rz
        Rx = css.gen_change[1] @ Rx
    return CssState(Sz2, Sx2, b2, theta, perm, orth, (Rz, Rx))


def is_orthogonal(theta: BitMatrix) -> bool:
    if not theta.is_square():
        return False
    eye = BitMatrix.identity(theta.nrows)
    return theta.T @ theta == eye and theta @ theta.T == eye


def canonical_from_theta(theta: BitMatrix, b: BitVector | None = None) -> CssState:
    n_x, n_z = theta.shape
    S_z = vstack([BitMatrix.identity(n_z), theta])
    S_x = vstack([theta.T, BitMatrix.identity(n_x)])
    return css_canonicalize(CssState(S_z, S_x, b))


def is_separable(css: CssState) -> tuple[bool, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Exhaustive bipartition test.

    A bipartition ``Q1 | Q2`` splits the state iff the rows of ``S_z`` on
    ``Q1`` and on ``Q2`` have ranks adding up to ``n_z``: the column space of
    ``S_z`` then decomposes into vectors supported on each side.
    """
    n = css.n
    if n > MAX_SEPARABILITY_N:
        raise TooLarge(f"separability check refused for n={n} > {MAX_SEPARABILITY_N}")
    Sz = css.S_z
    row_rank = {}
    for size in range(1, n):
        # qubit 0 on the first side avoids testing each split twice
        for rest in itertools.combinations(range(1, n), size - 1):
            q1 = (0,) + rest
            q2 = tuple(i for i in range(n) if i not in q1)
            r1 = row_rank.get(q1)
            if r1 is None:
                r1 = row_rank[q1] = rank(Sz.select_rows(q1))
            if r1 + rank(Sz.select_rows(q2)) == css.n_z:
                return True, (q1, q2)
    return False, None


def syndrome_flip(css: CssState, e: BitVector) -> BitVector:
    """Phase flips ``S^T P e`` caused by the Pauli error ``sigma_e``."""
    n = css.n
    if len(e) != 2 * n:
        raise ValueError("error vector must have length 2n")
    ez = BitVector(e.bits, n)
    ex = BitVector(e.bits >> n, n)
    # z-generators see the x-part of e, x-generators the z-part
    dz = css.S_z.T @ ex
    dx = css.S_x.T @ ez
    return BitVector(dz.bits | (dx.bits << css.n_z), n)


def measure_reveal(css: CssState, M_z: Sequence[int], M_x: Sequence[int]) -> BitMatrix:
    """Rows ``r`` whose parities ``r^T b`` are revealed by the given measurements.

    ``M_z`` qubits are measured in the z basis, ``M_x`` in the x basis.  ``r``
    qualifies iff ``S r`` vanishes on the z-rows of ``M_x`` and the x-rows of
    ``M_z``.
    """
    n, n_z = css.n, css.n_z
    mz, mx = set(M_z), set(M_x)
    if mz & mx or (mz | mx) != set(range(n)):
        raise BadPartition("M_z and M_x must partition the qubits")
    rows = []
    for i in sorted(mx):
        rows.append(css.S_z.row(i))
    for i in sorted(mz):
        rows.append(css.S_x.row(i) << n_z)
    if not rows:
        return BitMatrix.identity(n)
    return kernel_basis(BitMatrix(rows, n)).T


def reorder_copy_major_to_party_major(n: int, k: int) -> list[int]:
    """Index map: party-major position ``q*k + i`` <- copy-major ``i*n + q``."""
    return [i * n + q for q in range(n) for i in range(k)]
