"""Vertical (column-direction) codes and column-wise product encoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from . import gf2

# Primitive polynomials as coefficient lists, lowest degree first.  The
# m = 3..6 entries are the generator polynomials listed for the Hamming
# codes (x^3+x+1, x^4+x+1, x^5+x^2+1, x^6+x+1).
PRIMITIVE_POLYS = {
    2: (1, 1, 1),
    3: (1, 1, 0, 1),
    4: (1, 1, 0, 0, 1),
    5: (1, 0, 1, 0, 0, 1),
    6: (1, 1, 0, 0, 0, 0, 1),
    7: (1, 1, 0, 0, 0, 0, 0, 1),
    8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
    9: (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    10: (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
}

D_MIN_EXHAUSTIVE_MAX_N = 24


@dataclass(frozen=True, eq=False)
class VerticalCode:
    """A binary linear code applied down the columns of a codeword matrix.

    ``h`` is the m x n parity-check matrix.  Rows of the codeword matrix at
    ``systematic_positions`` carry information; the remaining rows are
    parity rows.  ``d_min`` is either known from the construction or
    computed.
    """

    name: str
    h: np.ndarray
    d_min: int | None = None
    systematic_positions: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        h = gf2.as_bits(self.h, 2)
        if not h.any(axis=0).all():
            raise ValueError(f"{self.name}: parity-check matrix has an all-zero column")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        # parity positions are pivots found scanning from the right, so
        # parity rows end up last whenever the trailing columns allow it
        _, pivots = gf2.row_reduce(h, col_order=range(h.shape[1] - 1, -1, -1))
        sys_pos = tuple(i for i in range(h.shape[1]) if i not in set(pivots))
        if self.systematic_positions is None:
            object.__setattr__(self, "systematic_positions", sys_pos)
        elif tuple(self.systematic_positions) != sys_pos:
            raise ValueError("systematic_positions do not match the parity-check matrix")
        if self.d_min is None:
            object.__setattr__(self, "d_min", _d_min_from_columns(h))
        if self.d_min < 1:
            raise ValueError("d_min must be at least 1")

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def k(self) -> int:
        return len(self.systematic_positions)

    @property
    def big_m(self) -> int:
        return (1 << self.m) - 1

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def parity_positions(self) -> tuple[int, ...]:
        sys_pos = set(self.systematic_positions)
        return tuple(i for i in range(self.n) if i not in sys_pos)

    @cached_property
    def he(self) -> np.ndarray:
        return gf2.extend_parity_check(self.h)

    @cached_property
    def parity_map(self) -> np.ndarray:
        """(n-k) x k matrix A with parity rows = A @ systematic rows."""
        sys_pos = list(self.systematic_positions)
        par_pos = list(self.parity_positions)
        r, pivots = gf2.row_reduce(self.h, col_order=par_pos[::-1])
        r = r[: len(pivots)]
        # row i of r has its pivot at column pivots[i]; reorder rows to par_pos
        by_pivot = {p: r[i] for i, p in enumerate(pivots)}
        return np.array([by_pivot[p][sys_pos] for p in par_pos], dtype=np.uint8).reshape(
            len(par_pos), len(sys_pos)
        )

    def generator(self) -> np.ndarray:
        """k x n generator matrix in the code's systematic layout."""
        g = np.zeros((self.k, self.n), dtype=np.uint8)
        g[:, list(self.systematic_positions)] = np.eye(self.k, dtype=np.uint8)
        if self.parity_positions:
            g[:, list(self.parity_positions)] = self.parity_map.T
        return g


def make_spc(n: int) -> VerticalCode:
    if n < 2:
        raise ValueError("single parity-check code needs n >= 2")
    return VerticalCode(f"spc:{n}", np.ones((1, n), dtype=np.uint8), d_min=2)


def make_hamming(m: int) -> VerticalCode:
    """Cyclic Hamming code of length 2**m - 1 in the form H = [P | I_m].

    Column ``j`` of P is ``x**(m + j) mod g(x)`` for the primitive
    polynomial g, which for m = 3 gives the familiar 3 x 7 matrix with
    columns 110, 011, 111, 101 ahead of the identity.
    """
    if not 2 <= m <= 10:
        raise ValueError("Hamming code parameter m must lie in 2..10")
    g = PRIMITIVE_POLYS[m]
    n = (1 << m) - 1
    cols = []
    state = [1] + [0] * (m - 1)  # x^0 as coefficient vector
    for _ in range(n):
        cols.append(state)
        # multiply by x and reduce modulo g
        carry = state[-1]
        state = [0] + state[:-1]
        if carry:
            state = [s ^ c for s, c in zip(state, g[:m])]
    h = np.array(cols[m:] + cols[:m], dtype=np.uint8).T
    return VerticalCode(f"hamming:{m}", h, d_min=3)


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = list(num)
    dn = len(den) - 1
    quot = [0] * max(len(num) - dn, 1)
    for i in range(len(num) - 1, dn - 1, -1):
        if num[i]:
            quot[i - dn] = 1
            for j, c in enumerate(den):
                num[i - dn + j] ^= c
    return quot, num[:dn]


def make_dpc(n: int) -> VerticalCode:
    """Cyclic double parity-check code generated by g(x) = x^2 + x + 1."""
    if n < 3 or n % 3:
        raise ValueError("x^2+x+1 divides x^n - 1 only for n a multiple of 3")
    xn1 = [1] + [0] * (n - 1) + [1]
    hpoly, rem = _poly_divmod(xn1, [1, 1, 1])
    assert not any(rem)
    rev = hpoly[::-1]
    h = np.zeros((2, n), dtype=np.uint8)
    for i in range(2):
        h[i, i : i + len(rev)] = rev
    return VerticalCode(f"dpc:{n}", h)


def from_parity_check(h, name: str = "custom") -> VerticalCode:
    return VerticalCode(name, h)


def encode_columns(info_rows, code: VerticalCode) -> np.ndarray:
    """Encode every column of a k x n' array with the vertical code.

    Returns the n x n' codeword matrix with the inputs at the systematic
    positions and the parity rows filled in.
    """
    info = gf2.as_bits(info_rows, 2)
    if info.shape[0] != code.k:
        raise ValueError(f"expected {code.k} information rows, got {info.shape[0]}")
    out = np.zeros((code.n, info.shape[1]), dtype=np.uint8)
    out[list(code.systematic_positions)] = info
    if code.parity_positions:
        out[list(code.parity_positions)] = gf2.matmul(code.parity_map, info)
    return out


def compute_d_min(code: VerticalCode) -> int:
    """Minimum weight over all 2**k - 1 nonzero codewords."""
    if code.n > D_MIN_EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive d_min search limited to n <= {D_MIN_EXHAUSTIVE_MAX_N}")
    if code.k == 0:
        raise ValueError("code has no nonzero codewords")
    rows = np.array(gf2.pack_rows(code.generator()), dtype=np.uint32)
    words = np.zeros(1, dtype=np.uint32)
    for g in rows:
        words = np.concatenate([words, words ^ g])
    return int(np.bitwise_count(words[1:]).min())


def _d_min_from_columns(h: np.ndarray, max_weight: int = 6) -> int:
    """Smallest number of columns of ``h`` summing to zero."""
    cols = [int(c) for c in gf2.pack_rows(h.T)]
    n = len(cols)
    for w in range(1, min(n, max_weight) + 1):
        for sub in combinations(cols, w):
            acc = 0
            for c in sub:
                acc ^= c
            if acc == 0:
                return w
    raise ValueError("minimum distance exceeds the column search limit")


def parse_code_spec(spec: str) -> VerticalCode:
    """Build a vertical code from ``spc:<n>``, ``hamming:<m>``, ``dpc:<n>`` or ``file:<path>``."""
    kind, _, arg = spec.partition(":")
    if not arg:
        raise ValueError(f"malformed code spec {spec!r}")
    if kind == "file":
        from .ldpc import parse_alist

        h = parse_alist(Path(arg).read_text()).h
        return VerticalCode(f"file:{Path(arg).name}", h)
    builders = {"spc": make_spc, "hamming": make_hamming, "dpc": make_dpc}
    if kind not in builders:
        raise ValueError(f"unknown code kind {kind!r}")
    try:
        value = int(arg)
    except ValueError:
        raise ValueError(f"malformed code spec {spec!r}") from None
    return builders[kind](value)
