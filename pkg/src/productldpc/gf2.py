"""Dense GF(2) vectors and matrices.

Bit vectors and matrices are plain ``numpy.uint8`` arrays holding 0/1.
Row weights of wide matrices are taken through packed integer masks
(bit ``j`` of a mask is column ``j``) so that restricting a row to a set
of columns is a single AND followed by a popcount.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

MAX_EXTEND_ROWS = 20


def as_bits(a, ndim: int | None = None) -> np.ndarray:
    """Validate ``a`` as a 0/1 array and return it as ``uint8``."""
    arr = np.asarray(a)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("bit arrays must be non-empty")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bit arrays may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False)


def pack_rows(m) -> list[int]:
    """Pack each row of a bit matrix into an int with bit j = column j."""
    m = as_bits(m, 2)
    weights = 1 << np.arange(m.shape[1], dtype=object)
    return [int(np.dot(row.astype(object), weights)) for row in m]


def unpack_mask(mask: int, ncols: int) -> np.ndarray:
    return np.array([(mask >> j) & 1 for j in range(ncols)], dtype=np.uint8)


def extend_parity_check(h) -> np.ndarray:
    """All nonzero GF(2) combinations of the rows of ``h``.

    Row ``b - 1`` of the result is the XOR of the rows of ``h`` selected by
    the bits of mask ``b`` (bit ``i`` selects row ``i``), for
    ``b = 1 .. 2**m - 1``.  Rank-deficient inputs give repeated rows.
    """
    h = as_bits(h, 2)
    m, n = h.shape
    if m > MAX_EXTEND_ROWS:
        raise ValueError(f"too many parity rows to extend: m={m} > {MAX_EXTEND_ROWS}")
    if not h.any(axis=0).all():
        raise ValueError("parity-check matrix has an all-zero column")
    big_m = (1 << m) - 1
    he = np.zeros((big_m + 1, n), dtype=np.uint8)
    # he[b] = he[b without its top bit] ^ h[top bit]
    for i in range(m):
        lo = 1 << i
        he[lo : 2 * lo] = he[:lo] ^ h[i]
    return he[1:]


def puncture_columns(he, cols: Sequence[int]) -> np.ndarray:
    he = as_bits(he, 2)
    cols = list(cols)
    if not cols:
        raise ValueError("column selection is empty")
    if any(b <= a for a, b in zip(cols, cols[1:])):
        raise ValueError("column indices must be strictly increasing (no duplicates)")
    if cols[0] < 0 or cols[-1] >= he.shape[1]:
        raise ValueError(f"column index out of range for {he.shape[1]} columns")
    return he[:, cols]


def min_nonzero_row_weight(m) -> tuple[int, int] | None:
    """Smallest nonzero row weight and the first row attaining it.

    Returns ``None`` when every row is zero.
    """
    weights = as_bits(m, 2).sum(axis=1)
    nz = np.flatnonzero(weights)
    if nz.size == 0:
        return None
    w = int(weights[nz].min())
    return w, int(nz[np.argmax(weights[nz] == w)])


def xor_rows(vs: Iterable) -> np.ndarray:
    vs = [as_bits(v, 1) for v in vs]
    if not vs:
        raise ValueError("need at least one vector")
    if any(v.shape != vs[0].shape for v in vs):
        raise ValueError("length mismatch")
    out = vs[0].copy()
    for v in vs[1:]:
        out ^= v
    return out


def row_reduce(m, col_order: Sequence[int] | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2).

    Pivots are searched column by column in ``col_order`` (default left to
    right).  Returns the reduced matrix, with zero rows moved to the
    bottom, and the pivot columns in the order they were found.
    """
    r = as_bits(m, 2).copy()
    rows, cols = r.shape
    order = range(cols) if col_order is None else col_order
    pivots: list[int] = []
    prow = 0
    for c in order:
        if prow == rows:
            break
        hits = np.flatnonzero(r[prow:, c])
        if hits.size == 0:
            continue
        src = prow + hits[0]
        if src != prow:
            r[[prow, src]] = r[[src, prow]]
        others = np.flatnonzero(r[:, c])
        others = others[others != prow]
        r[others] ^= r[prow]
        pivots.append(int(c))
        prow += 1
    return r, pivots


def rank(m) -> int:
    return len(row_reduce(m)[1])


def matmul(a, b) -> np.ndarray:
    """GF(2) matrix product."""
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) & 1).astype(np.uint8)
