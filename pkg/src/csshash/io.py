"""Text formats for matrices, CSS states and diagonal mixtures."""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .gf2 import BitMatrix, BitVector
from .stabilizer import CssState
from .yieldlp import DiagonalMixture


class ParseError(ValueError):
    """Malformed input; ``line`` is 1-based."""

    def __init__(self, line: int, msg: str, source: str = "<input>"):
        super().__init__(f"{source}:{line}: {msg}")
        self.line = line


def _lines(text: str) -> list[tuple[int, str]]:
    return [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines()) if ln.strip()]


def _bit_row(s: str, width: int, lineno: int, src: str) -> int:
    if len(s) != width or set(s) - {"0", "1"}:
        raise ParseError(lineno, f"expected {width} characters from {{0,1}}, got {s!r}", src)
    return sum(1 << j for j, ch in enumerate(s) if ch == "1")


def format_matrix(m: BitMatrix) -> str:
    rows = ["".join(str(v) for v in r) for r in m.to_lists()]
    return "\n".join([f"{m.nrows} {m.ncols}"] + rows) + "\n"


def parse_matrix(text: str, source: str = "<input>") -> BitMatrix:
    lines = _lines(text)
    if not lines:
        raise ParseError(1, "empty matrix file", source)
    ln, head = lines[0]
    m = re.fullmatch(r"(\d+)\s+(\d+)", head)
    if not m:
        raise ParseError(ln, f"expected 'rows cols', got {head!r}", source)
    r, c = int(m.group(1)), int(m.group(2))
    body = lines[1:]
    if len(body) != r:
        at = body[r][0] if len(body) > r else (body[-1][0] + 1 if body else ln + 1)
        raise ParseError(at, f"expected {r} rows, found {len(body)}", source)
    return BitMatrix([_bit_row(s, c, i, source) for i, s in body], c)


def format_css_state(css: CssState) -> str:
    out = ["css-state v1", f"n={css.n} nz={css.n_z} nx={css.n_x}", "Sz:"]
    out += ["".join(str(v) for v in r) for r in css.S_z.to_lists()]
    out.append("Sx:")
    out += ["".join(str(v) for v in r) for r in css.S_x.to_lists()]
    if css.b.bits:
        out.append(f"b={css.b}")
    return "\n".join(out) + "\n"


def parse_css_state(text: str, source: str = "<input>") -> CssState:
    lines = _lines(text)
    if not lines or lines[0][1] != "css-state v1":
        raise ParseError(lines[0][0] if lines else 1, "expected header 'css-state v1'", source)
    if len(lines) < 2:
        raise ParseError(lines[0][0] + 1, "missing 'n=<n> nz=<n_z> nx=<n_x>' line", source)
    ln, dims = lines[1]
    m = re.fullmatch(r"n=(\d+)\s+nz=(\d+)\s+nx=(\d+)", dims)
    if not m:
        raise ParseError(ln, f"expected 'n=<n> nz=<n_z> nx=<n_x>', got {dims!r}", source)
    n, nz, nx = (int(g) for g in m.groups())
    if nz + nx != n:
        raise ParseError(ln, f"nz + nx = {nz + nx} does not equal n = {n}", source)
    pos = 2

    def block(tag: str, width: int) -> BitMatrix:
        nonlocal pos
        if pos >= len(lines) or lines[pos][1] != tag:
            at = lines[pos][0] if pos < len(lines) else lines[-1][0] + 1
            raise ParseError(at, f"expected '{tag}'", source)
        pos += 1
        rows = []
        for _ in range(n):
            if pos >= len(lines):
                raise ParseError(lines[-1][0] + 1, f"{tag} block ends after {len(rows)} of {n} rows", source)
            i, s = lines[pos]
            rows.append(_bit_row(s, width, i, source))
            pos += 1
        return BitMatrix(rows, width)

    S_z = block("Sz:", nz)
    S_x = block("Sx:", nx)
    b = None
    if pos < len(lines):
        i, s = lines[pos]
        if not s.startswith("b="):
            raise ParseError(i, f"unexpected line {s!r}", source)
        b = BitVector(_bit_row(s[2:], n, i, source), n)
        pos += 1
    if pos < len(lines):
        raise ParseError(lines[pos][0], f"unexpected line {lines[pos][1]!r}", source)
    try:
        return CssState(S_z, S_x, b)
    except ValueError as e:
        raise ParseError(ln, str(e), source) from e


def _bits_string(b: int, n: int) -> str:
    return "".join(str((b >> j) & 1) for j in range(n))


def format_mixture(mix: DiagonalMixture, digits: int = 17) -> str:
    out = ["mixture v1", f"n={mix.n}"]
    for b, p in enumerate(mix.p.tolist()):
        if p:
            out.append(f"{_bits_string(b, mix.n)} {p:.{digits}g}")
    return "\n".join(out) + "\n"


def parse_mixture(text: str, source: str = "<input>", tol: float = 1e-9) -> DiagonalMixture:
    """Probabilities may be decimals or fractions ``a/b``; they must sum to 1 within ``tol``."""
    lines = _lines(text)
    if not lines or lines[0][1] != "mixture v1":
        raise ParseError(lines[0][0] if lines else 1, "expected header 'mixture v1'", source)
    if len(lines) < 2:
        raise ParseError(lines[0][0] + 1, "missing 'n=<n>' line", source)
    ln, head = lines[1]
    m = re.fullmatch(r"n=(\d+)", head)
    if not m:
        raise ParseError(ln, f"expected 'n=<n>', got {head!r}", source)
    n = int(m.group(1))
    if n < 1 or n > 20:
        raise ParseError(ln, f"n={n} outside the supported range 1..20", source)
    p = np.zeros(1 << n)
    seen = set()
    for i, s in lines[2:]:
        parts = s.split()
        if len(parts) != 2:
            raise ParseError(i, f"expected '<{n} bits> <probability>', got {s!r}", source)
        b = _bit_row(parts[0], n, i, source)
        if b in seen:
            raise ParseError(i, f"duplicate entry for {parts[0]}", source)
        seen.add(b)
        try:
            v = float(Fraction(parts[1]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(i, f"bad probability {parts[1]!r}", source) from None
        if v < 0:
            raise ParseError(i, "negative probability", source)
        p[b] = v
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ParseError(lines[-1][0], f"probabilities sum to {total!r}, not 1", source)
    return DiagonalMixture(n, p / total)


def read_css_state(path: str | Path) -> CssState:
    return parse_css_state(Path(path).read_text(), str(path))


def read_mixture(path: str | Path) -> DiagonalMixture:
    return parse_mixture(Path(path).read_text(), str(path))


def read_matrix(path: str | Path) -> BitMatrix:
    return parse_matrix(Path(path).read_text(), str(path))
