"""Diagonal mixtures produced by Pauli noise on a pure CSS state."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gf2 import BitMatrix, BitVector, TooLarge, vstack
from .stabilizer import CssState, css_canonicalize, is_orthogonal
from .yieldlp import DiagonalMixture

MAX_CHANNEL_QUBITS = 16


@dataclass(frozen=True)
class PauliChannel:
    q_I: object
    q_X: object
    q_Y: object
    q_Z: object

    def __post_init__(self):
        qs = (self.q_I, self.q_X, self.q_Y, self.q_Z)
        if any(q < 0 for q in qs):
            raise ValueError("negative channel probability")
        if abs(sum(qs) - 1) > 1e-12:
            raise ValueError("channel probabilities must sum to 1")


def depolarizing(F) -> PauliChannel:
    e = (1 - F) / 3
    return PauliChannel(F, e, e, e)


def identity_channel() -> PauliChannel:
    return PauliChannel(1, 0, 0, 0)


def _single_qubit_flips(css: CssState, q: int) -> tuple[int, int, int]:
    """Phase flips from X, Y, Z on qubit ``q``."""
    x = css.S_z.row(q)
    z = css.S_x.row(q) << css.n_z
    return x, x ^ z, z


def pauli_channel_distribution(css: CssState, channels: Sequence[PauliChannel]) -> list:
    """``p(b)`` for the noisy state, in the number type of the channel entries.

    Per-qubit flip distributions are convolved; feeding ``Fraction`` channel
    probabilities gives exact rational output.
    """
    n = css.n
    if len(channels) != n:
        raise ValueError(f"need one channel per qubit ({n}), got {len(channels)}")
    if n > MAX_CHANNEL_QUBITS:
        raise TooLarge(f"channel mixture refused for n={n}")
    if css.b.bits:
        raise ValueError("channels act on the b = 0 state only")
    dist = [0] * (1 << n)
    dist[0] = 1
    for q, ch in enumerate(channels):
        fx, fy, fz = _single_qubit_flips(css, q)
        new = [0] * (1 << n)
        for s, w in enumerate(dist):
            if not w:
                continue
            new[s] += w * ch.q_I
            new[s ^ fx] += w * ch.q_X
            new[s ^ fy] += w * ch.q_Y
            new[s ^ fz] += w * ch.q_Z
        dist = new
    return dist


def pauli_channel_mixture(css: CssState, channels: Sequence[PauliChannel]) -> DiagonalMixture:
    dist = np.array([float(x) for x in pauli_channel_distribution(css, channels)])
    return DiagonalMixture(css.n, dist / dist.sum())


def cat_state(n: int) -> CssState:
    if n < 2:
        raise ValueError("a cat state needs at least 2 qubits")
    S_z = vstack([BitMatrix.identity(n - 1), BitMatrix.ones(1, n - 1)])
    S_x = BitMatrix.ones(n, 1)
    return CssState(S_z, S_x, BitVector.zeros(n))


def cat4_channels(F) -> list[PauliChannel]:
    """The first party keeps its qubit; the other three go through ``depolarizing(F)``."""
    return [identity_channel()] + [depolarizing(F)] * 3


def cat4_mixture(F) -> DiagonalMixture:
    return pauli_channel_mixture(cat_state(4), cat4_channels(F))


# rows p_0000..p_1111 against (F^3, F^2 e, F e^2, e^3), e = (1-F)/3
CAT4_COEFFICIENTS = (
    (1, 0, 3, 0), (0, 3, 0, 1), (0, 1, 2, 1), (0, 1, 2, 1),
    (0, 1, 2, 1), (0, 1, 2, 1), (0, 0, 2, 2), (0, 0, 2, 2),
    (0, 0, 0, 4), (0, 0, 0, 4), (0, 0, 2, 2), (0, 0, 2, 2),
    (0, 0, 2, 2), (0, 0, 2, 2), (0, 1, 2, 1), (0, 1, 2, 1),
)


def cat4_table_mixture(F) -> list:
    """``p_b`` from the closed-form coefficient table, ``b`` read as ``b_1 b_2 b_3 b_4``."""
    e = (1 - F) / 3
    basis = (F**3, F**2 * e, F * e**2, e**3)
    out = [0] * 16
    for row, coeffs in enumerate(CAT4_COEFFICIENTS):
        s = format(row, "04b")
        b = sum(int(ch) << j for j, ch in enumerate(s))
        out[b] = sum(c * v for c, v in zip(coeffs, basis))
    return out


def bell_state() -> CssState:
    return cat_state(2)


def bell_mixture(p00: float, p01: float, p10: float, p11: float) -> DiagonalMixture:
    """Bell-diagonal mixture; ``pzx`` is the weight of ``b_z = z, b_x = x``."""
    return DiagonalMixture(2, np.array([p00, p10, p01, p11], dtype=float))


EXAMPLE_8Q_THETA = BitMatrix.ones(4, 4) + BitMatrix.identity(4)


def example_8q() -> tuple[CssState, DiagonalMixture]:
    """The orthogonal 8-qubit state with ``p(0) = 3/4`` and 127 states at ``1/508``."""
    theta = EXAMPLE_8Q_THETA
    assert is_orthogonal(theta)
    S_z = vstack([BitMatrix.identity(4), theta])
    S_x = vstack([theta.T, BitMatrix.identity(4)])
    css = CssState(S_z, S_x)
    p = np.zeros(256)
    for b in range(256):
        if b & 1:
            continue
        p[b] = 0.75 if b == 0 else 1.0 / 508.0
    return css, DiagonalMixture(8, p)


def example_8q_exact() -> list[Fraction]:
    return [Fraction(0) if b & 1 else (Fraction(3, 4) if b == 0 else Fraction(1, 508)) for b in range(256)]


def canonical(css: CssState) -> CssState:
    return css_canonicalize(css)
