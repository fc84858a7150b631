"""Dense linear algebra over GF(2).

Matrices are stored row-wise as Python ints: bit ``j`` of ``rows[i]`` is the
entry ``(i, j)``.  Row operations are then single XORs on arbitrary-width
words, which is what elimination, rank and kernel computations spend their
time on.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

import numpy as np


class SingularMatrix(ValueError):
    pass


class TooLarge(ValueError):
    pass


MAX_SUBSPACE_N = 14
MAX_SYMPLECTIC_K = 64


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def parity(x: int) -> int:
    return x.bit_count() & 1


def random_bits(rng: np.random.Generator, nbits: int) -> int:
    """Uniform random integer in ``[0, 2**nbits)``."""
    if nbits <= 0:
        return 0
    raw = int.from_bytes(rng.bytes((nbits + 7) // 8), "little")
    return raw & ((1 << nbits) - 1)


class BitVector:
    __slots__ = ("_len", "_bits")

    def __init__(self, bits: int, length: int):
        if length < 0:
            raise ValueError("negative length")
        self._len = length
        self._bits = bits & ((1 << length) - 1)

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "BitVector":
        values = [int(v) & 1 for v in values]
        return cls(sum(v << i for i, v in enumerate(values)), len(values))

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        s = s.strip()
        if any(ch not in "01" for ch in s):
            raise ValueError(f"not a bit string: {s!r}")
        return cls.from_list(int(ch) for ch in s)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(0, length)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        return cls(1 << index, length)

    def __len__(self) -> int:
        return self._len

    @property
    def bits(self) -> int:
        return self._bits

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._len:
            raise IndexError(i)
        return (self._bits >> i) & 1

    def __add__(self, other: "BitVector") -> "BitVector":
        if self._len != other._len:
            raise ValueError("length mismatch")
        return BitVector(self._bits ^ other._bits, self._len)

    __xor__ = __add__

    def dot(self, other: "BitVector") -> int:
        return parity(self._bits & other._bits)

    def weight(self) -> int:
        return self._bits.bit_count()

    def to_list(self) -> list[int]:
        return [(self._bits >> i) & 1 for i in range(self._len)]

    def to_array(self) -> np.ndarray:
        return np.array(self.to_list(), dtype=np.uint8)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._len == other._len and self._bits == other._bits

    def __hash__(self) -> int:
        return hash((self._len, self._bits))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())

    def __repr__(self) -> str:
        return f"BitVector('{self}')"


class BitMatrix:
    """Immutable ``nrows x ncols`` matrix over GF(2)."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[int], ncols: int):
        mask = (1 << ncols) - 1
        self._rows = tuple(int(r) & mask for r in rows)
        self._ncols = ncols

    # -- construction ---------------------------------------------------
    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        packed = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            packed.append(sum((int(v) & 1) << j for j, v in enumerate(r)))
        return cls(packed, ncols)

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.int64) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls.from_lists(a.tolist(), a.shape[1])

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "BitMatrix":
        return cls(columns, nrows).T

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls((1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls((0,) * nrows, ncols)

    @classmethod
    def ones(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(((1 << ncols) - 1,) * nrows, ncols)

    # -- basic access ---------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), self._ncols)

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    def row(self, i: int) -> int:
        return self._rows[i]

    def row_vector(self, i: int) -> BitVector:
        return BitVector(self._rows[i], self._ncols)

    def col(self, j: int) -> int:
        return sum(((r >> j) & 1) << i for i, r in enumerate(self._rows))

    def col_vector(self, j: int) -> BitVector:
        return BitVector(self.col(j), self.nrows)

    def columns(self) -> list[int]:
        return list(self.T.rows)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not 0 <= j < self._ncols:
            raise IndexError(idx)
        return (self._rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self._rows):
            for j in _bits(r):
                out[i, j] = 1
        return out

    def to_lists(self) -> list[list[int]]:
        return self.to_array().tolist()

    # -- algebra ----------------------------------------------------------
    @property
    def T(self) -> "BitMatrix":
        cols = [0] * self._ncols
        for i, r in enumerate(self._rows):
            bit = 1 << i
            for j in _bits(r):
                cols[j] |= bit
        return BitMatrix(cols, self.nrows)

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            if len(other) != self._ncols:
                raise ValueError(f"shape mismatch {self.shape} @ ({len(other)},)")
            v = other.bits
            return BitVector(sum(parity(r & v) << i for i, r in enumerate(self._rows)), self.nrows)
        if not isinstance(other, BitMatrix):
            return NotImplemented
        if self._ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other._rows
        out = []
        for r in self._rows:
            acc = 0
            for j in _bits(r):
                acc ^= orows[j]
            out.append(acc)
        return BitMatrix(out, other._ncols)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return BitMatrix((a ^ b for a, b in zip(self._rows, other._rows)), self._ncols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._ncols, self._rows))

    def is_zero(self) -> bool:
        return not any(self._rows)

    def is_square(self) -> bool:
        return self.nrows == self._ncols

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "BitMatrix":
        """Submatrix of rows ``r0:r1`` and columns ``c0:c1``."""
        return BitMatrix((r >> c0 for r in self._rows[r0:r1]), c1 - c0)

    def select_rows(self, idx: Sequence[int]) -> "BitMatrix":
        return BitMatrix((self._rows[i] for i in idx), self._ncols)

    def select_cols(self, idx: Sequence[int]) -> "BitMatrix":
        return self.T.select_rows(idx).T

    def __str__(self) -> str:
        return "\n".join(
            "".join(str((r >> j) & 1) for j in range(self._ncols)) for r in self._rows
        )

    def __repr__(self) -> str:
        body = ";".join(
            "".join(str((r >> j) & 1) for j in range(self._ncols)) for r in self._rows
        )
        return f"BitMatrix({self.nrows}x{self._ncols}: {body})"


# -- assembly helpers ---------------------------------------------------------

def hstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    mats = list(mats)
    if not mats:
        raise ValueError("nothing to stack")
    nrows = mats[0].nrows
    if any(m.nrows != nrows for m in mats):
        raise ValueError("row count mismatch in hstack")
    rows = [0] * nrows
    shift = 0
    for m in mats:
        for i, r in enumerate(m.rows):
            rows[i] |= r << shift
        shift += m.ncols
    return BitMatrix(rows, shift)


def vstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    mats = list(mats)
    if not mats:
        raise ValueError("nothing to stack")
    ncols = mats[0].ncols
    if any(m.ncols != ncols for m in mats):
        raise ValueError("column count mismatch in vstack")
    return BitMatrix(itertools.chain.from_iterable(m.rows for m in mats), ncols)


def block_matrix(blocks: Sequence[Sequence[BitMatrix]]) -> BitMatrix:
    return vstack([hstack(row) for row in blocks])


def block_diag(mats: Sequence[BitMatrix]) -> BitMatrix:
    ncols = sum(m.ncols for m in mats)
    rows = []
    shift = 0
    for m in mats:
        rows.extend(r << shift for r in m.rows)
        shift += m.ncols
    return BitMatrix(rows, ncols)


def kron(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    ma, na = a.shape
    mb, nb = b.shape
    rows = []
    for ra in a.rows:
        js = list(_bits(ra))
        for rb in b.rows:
            acc = 0
            for j in js:
                acc |= rb << (j * nb)
            rows.append(acc)
    return BitMatrix(rows, na * nb)


def column_elemwise_product(u: int, v: int) -> int:
    """The ``u ⊙ v`` product of two packed columns."""
    return u & v


def symplectic_form(k: int) -> BitMatrix:
    """``P = [[0, I_k], [I_k, 0]]``."""
    rows = [1 << (k + i) for i in range(k)] + [1 << i for i in range(k)]
    return BitMatrix(rows, 2 * k)


def is_symplectic(c: BitMatrix) -> bool:
    if not c.is_square() or c.nrows % 2:
        return False
    p = symplectic_form(c.nrows // 2)
    return c.T @ p @ c == p


# -- elimination --------------------------------------------------------------

def _rref_rows(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [r for r in rows if r]
    pivots: list[int] = []
    out: list[int] = []
    for col in range(ncols):
        bit = 1 << col
        piv = next((idx for idx, r in enumerate(work) if r & bit), None)
        if piv is None:
            continue
        prow = work.pop(piv)
        work = [r ^ prow if r & bit else r for r in work]
        out = [r ^ prow if r & bit else r for r in out]
        out.append(prow)
        pivots.append(col)
        work = [r for r in work if r]
        if not work:
            break
    return out, pivots


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    rows, pivots = _rref_rows(m.rows, m.ncols)
    return BitMatrix(rows, m.ncols), pivots


def rank(m: BitMatrix) -> int:
    # Plain forward elimination; rank does not need the reduced form.
    work = [r for r in m.rows if r]
    rk = 0
    while work:
        prow = work.pop()
        low = prow & -prow
        work = [r ^ prow if r & low else r for r in work]
        work = [r for r in work if r]
        rk += 1
    return rk


def rank_of_ints(rows: Iterable[int]) -> int:
    work = [r for r in rows if r]
    rk = 0
    while work:
        prow = work.pop()
        low = prow & -prow
        work = [r for r in (r ^ prow if r & low else r for r in work) if r]
        rk += 1
    return rk


def invert(m: BitMatrix) -> BitMatrix:
    if not m.is_square():
        raise ValueError(f"cannot invert non-square {m.shape} matrix")
    n = m.nrows
    work = [r | (1 << (n + i)) for i, r in enumerate(m.rows)]
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(col, n) if work[i] & bit), None)
        if piv is None:
            raise SingularMatrix(f"matrix of shape {m.shape} is singular")
        work[col], work[piv] = work[piv], work[col]
        prow = work[col]
        for i in range(n):
            if i != col and work[i] & bit:
                work[i] ^= prow
    return BitMatrix((r >> n for r in work), n)


def is_invertible(m: BitMatrix) -> bool:
    return m.is_square() and rank(m) == m.nrows


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of ``{v : m v = 0}`` as the columns of a ``ncols x nullity`` matrix.

    Column ``t`` has a 1 in the ``t``-th free position and 0 in every other
    free position, so the basis is the canonical one for the subspace.
    """
    rows, pivots = _rref_rows(m.rows, m.ncols)
    pivset = set(pivots)
    free = [j for j in range(m.ncols) if j not in pivset]
    cols = []
    for f in free:
        v = 1 << f
        for r, p in zip(rows, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        cols.append(v)
    return BitMatrix.from_columns(cols, m.ncols) if cols else BitMatrix.zeros(m.ncols, 0)


def column_space_key(m: BitMatrix) -> tuple[int, ...]:
    """Hashable canonical identifier of the column space of ``m``."""
    rows, _ = _rref_rows(m.T.rows, m.nrows)
    return tuple(sorted(rows))


def solve(m: BitMatrix, y: BitVector) -> BitVector | None:
    """One solution of ``m x = y`` (free variables zero), or ``None``."""
    if len(y) != m.nrows:
        raise ValueError("length of y must equal rows of m")
    n = m.ncols
    aug = [r | (((y.bits >> i) & 1) << n) for i, r in enumerate(m.rows)]
    rows, pivots = _rref_rows(aug, n + 1)
    x = 0
    for r, p in zip(rows, pivots):
        if p == n:
            return None
        if (r >> n) & 1:
            x |= 1 << p
    return BitVector(x, n)


# -- enumeration and sampling -------------------------------------------------

def gaussian_binomial(n: int, d: int) -> int:
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= (1 << (n - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den


def enumerate_subspaces(n: int, d: int) -> Iterator[BitMatrix]:
    """Every ``d``-dimensional subspace of ``Z_2^n`` exactly once.

    Each is returned as an ``n x d`` basis matrix in reduced column echelon
    form.
    """
    if n > MAX_SUBSPACE_N:
        raise TooLarge(f"subspace enumeration refused for n={n} > {MAX_SUBSPACE_N}")
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if d == 0:
        yield BitMatrix.zeros(n, 0)
        return
    for pivots in itertools.combinations(range(n), d):
        pivset = set(pivots)
        # free positions of each basis row: to the right of its pivot, not a pivot
        free = [[j for j in range(p + 1, n) if j not in pivset] for p in pivots]
        slots = [(r, j) for r, fr in enumerate(free) for j in fr]
        for fill in range(1 << len(slots)):
            rows = [1 << p for p in pivots]
            for s, (r, j) in enumerate(slots):
                if (fill >> s) & 1:
                    rows[r] |= 1 << j
            yield BitMatrix(rows, n).T


def sample_invertible(n: int, rng: np.random.Generator) -> BitMatrix:
    """Uniform element of GL(n, 2) by rejection."""
    if n < 1:
        raise ValueError("n must be positive")
    while True:
        rows = [random_bits(rng, n) for _ in range(n)]
        if rank_of_ints(rows) == n:
            return BitMatrix(rows, n)


def symplectic_product(u: int, v: int, k: int) -> int:
    """``u^T P v`` for packed vectors of length ``2k`` (z-part in the low bits)."""
    mask = (1 << k) - 1
    return parity(((u & mask) & (v >> k)) ^ ((u >> k) & (v & mask)))


def _random_in_span(basis: Sequence[int], rng: np.random.Generator) -> int:
    coeffs = random_bits(rng, len(basis))
    v = 0
    for j in _bits(coeffs):
        v ^= basis[j]
    return v


def sample_symplectic(k: int, rng: np.random.Generator) -> BitMatrix:
    """Uniform element of Sp(2k, 2).

    Builds a random symplectic basis ``e_1..e_k, f_1..f_k`` one hyperbolic pair
    at a time.  The number of admissible choices at every step does not
    depend on earlier choices, so the resulting matrix is uniform.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > MAX_SYMPLECTIC_K:
        raise TooLarge(f"symplectic sampling refused for k={k} > {MAX_SYMPLECTIC_K}")
    space = [1 << i for i in range(2 * k)]
    es: list[int] = []
    fs: list[int] = []
    for _ in range(k):
        e = 0
        while not e:
            e = _random_in_span(space, rng)
        while True:
            f = _random_in_span(space, rng)
            if symplectic_product(e, f, k):
                break
        es.append(e)
        fs.append(f)
        proj = []
        for w in space:
            w2 = w
            if symplectic_product(w, f, k):
                w2 ^= e
            if symplectic_product(w, e, k):
                w2 ^= f
            proj.append(w2)
        space, _ = _rref_rows(proj, 2 * k)
    return BitMatrix.from_columns(es + fs, 2 * k)


def enumerate_symplectic(k: int) -> Iterator[BitMatrix]:
    """All of Sp(2k, 2); only sensible for ``k <= 2`` (720 elements)."""

    def rec(space: list[int], es: list[int], fs: list[int]):
        if len(es) == k:
            yield BitMatrix.from_columns(es + fs, 2 * k)
            return
        span = set()
        for coeffs in range(1, 1 << len(space)):
            v = 0
            for j in _bits(coeffs):
                v ^= space[j]
            span.add(v)
        span = sorted(span)
        for e in span:
            for f in span:
                if not symplectic_product(e, f, k):
                    continue
                proj = []
                for w in space:
                    w2 = w
                    if symplectic_product(w, f, k):
                        w2 ^= e
                    if symplectic_product(w, e, k):
                        w2 ^= f
                    proj.append(w2)
                sub, _ = _rref_rows(proj, 2 * k)
                yield from rec(sub, es + [e], fs + [f])

    yield from rec([1 << i for i in range(2 * k)], [], [])


def enumerate_invertible(n: int) -> Iterator[BitMatrix]:
    """All of GL(n, 2) by brute force over row tuples (``n <= 4``)."""
    for rows in itertools.product(range(1, 1 << n), repeat=n):
        if rank_of_ints(rows) == n:
            yield BitMatrix(rows, n)
