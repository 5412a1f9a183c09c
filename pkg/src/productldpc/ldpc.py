"""Horizontal LDPC codes: alist I/O, systematic encoding, puncturing and
flooding sum-product decoding."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from math import ceil
from pathlib import Path

import numpy as np
from numba import njit

from . import gf2

DEFAULT_CLAMP = 30.0
DEFAULT_MAX_ITERS = 50

BUILTIN_CODES = {
    "n504": "peg_504_252.alist",
    "n96": "peg_96_48.alist",
}


@dataclass(frozen=True, eq=False)
class LdpcCode:
    """Binary LDPC code given by a sparse parity-check matrix.

    The systematic generator is derived by GF(2) elimination.  Information
    bits sit at ``info_positions`` of a codeword, parity bits at
    ``parity_positions``.  Punctured positions are never transmitted.
    """

    h: np.ndarray
    puncture_pattern: tuple[int, ...] = ()
    name: str = "ldpc"

    def __post_init__(self):
        h = gf2.as_bits(self.h, 2).copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        pattern = tuple(sorted(set(int(i) for i in self.puncture_pattern)))
        if pattern and (pattern[0] < 0 or pattern[-1] >= h.shape[1]):
            raise ValueError("puncture index out of range")
        object.__setattr__(self, "puncture_pattern", pattern)

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def k(self) -> int:
        return self.n - len(self._systematic[1])

    @property
    def rate(self) -> float:
        """Information bits per transmitted bit, puncturing included."""
        return self.k / (self.n - len(self.puncture_pattern))

    @cached_property
    def _systematic(self) -> tuple[np.ndarray, list[int]]:
        # parity pivots searched from the right so information bits lead
        return gf2.row_reduce(self.h, col_order=range(self.n - 1, -1, -1))

    @property
    def parity_positions(self) -> tuple[int, ...]:
        return tuple(sorted(self._systematic[1]))

    @property
    def info_positions(self) -> tuple[int, ...]:
        par = set(self._systematic[1])
        return tuple(i for i in range(self.n) if i not in par)

    @property
    def column_permutation(self) -> tuple[int, ...]:
        """Codeword positions listed information bits first, then parity."""
        return self.info_positions + self.parity_positions

    @cached_property
    def generator(self) -> np.ndarray:
        r, pivots = self._systematic
        info = list(self.info_positions)
        g = np.zeros((self.k, self.n), dtype=np.uint8)
        g[:, info] = np.eye(self.k, dtype=np.uint8)
        g[:, pivots] = r[: len(pivots)][:, info].T
        return g

    @cached_property
    def zero_degree_vars(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(~self.h.any(axis=0)))

    @cached_property
    def _graph(self):
        chk, var = np.nonzero(self.h)  # sorted by check
        chk_ptr = np.searchsorted(chk, np.arange(self.h.shape[0] + 1)).astype(np.int64)
        var_edge = np.argsort(var, kind="stable").astype(np.int64)
        var_ptr = np.searchsorted(var[var_edge], np.arange(self.n + 1)).astype(np.int64)
        return chk_ptr, var.astype(np.int64), var_ptr, var_edge

    def edges(self) -> list[tuple[int, int]]:
        chk, var = np.nonzero(self.h)
        return list(zip(chk.tolist(), var.tolist()))

    def with_puncture(self, pattern) -> LdpcCode:
        return dataclasses.replace(self, puncture_pattern=tuple(pattern))


@dataclass
class DecodeOutcome:
    success: bool
    codeword: np.ndarray
    iterations: int
    final_llrs: np.ndarray = field(repr=False)


# --------------------------------------------------------------------------
# alist


def parse_alist(text: str, name: str = "ldpc") -> LdpcCode:
    """Parse the standard alist layout (1-indexed, zero padding allowed).

    The check-node lists are optional; when present they must agree with
    the variable-node lists.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        nums = [[int(x) for x in ln] for ln in lines]
    except ValueError as exc:
        raise ValueError(f"alist: non-integer token ({exc})") from None
    if len(nums) < 4 or len(nums[0]) < 2 or len(nums[1]) < 2:
        raise ValueError("alist: truncated header")
    n, m = nums[0][:2]
    max_vdeg, max_cdeg = nums[1][:2]
    vdeg, cdeg = nums[2], nums[3]
    if n < 1 or m < 1:
        raise ValueError("alist: dimensions must be positive")
    if len(vdeg) != n or len(cdeg) != m:
        raise ValueError("alist: degree list lengths do not match n and m")
    if sum(vdeg) != sum(cdeg):
        raise ValueError("alist: variable and check degree totals differ")
    if max(vdeg) > max_vdeg or max(cdeg) > max_cdeg:
        raise ValueError("alist: degree exceeds declared maximum")
    if len(nums) < 4 + n:
        raise ValueError("alist: missing variable-node lists")
    h = np.zeros((m, n), dtype=np.uint8)
    for v in range(n):
        nbrs = [x for x in nums[4 + v] if x != 0]
        if len(nbrs) != vdeg[v]:
            raise ValueError(f"alist: variable {v + 1} lists {len(nbrs)} checks, degree says {vdeg[v]}")
        for c in nbrs:
            if not 1 <= c <= m:
                raise ValueError(f"alist: check index {c} out of range")
            h[c - 1, v] = 1
    if len(nums) >= 4 + n + m:
        for c in range(m):
            nbrs = [x for x in nums[4 + n + c] if x != 0]
            if len(nbrs) != cdeg[c]:
                raise ValueError(f"alist: check {c + 1} lists {len(nbrs)} variables, degree says {cdeg[c]}")
            for v in nbrs:
                if not 1 <= v <= n:
                    raise ValueError(f"alist: variable index {v} out of range")
                if not h[c, v - 1]:
                    raise ValueError(f"alist: check list entry ({c + 1}, {v}) missing from variable lists")
    elif len(nums) != 4 + n:
        raise ValueError("alist: incomplete check-node lists")
    return LdpcCode(h, name=name)


def load_alist(path) -> LdpcCode:
    path = Path(path)
    return parse_alist(path.read_text(), name=path.name)


def to_alist(h) -> str:
    h = gf2.as_bits(h, 2)
    m, n = h.shape
    vlists = [np.flatnonzero(h[:, v]) + 1 for v in range(n)]
    clists = [np.flatnonzero(h[c]) + 1 for c in range(m)]
    vmax = max(len(x) for x in vlists)
    cmax = max(len(x) for x in clists)

    def pad(xs, width):
        return " ".join(str(int(x)) for x in list(xs) + [0] * (width - len(xs)))

    out = [f"{n} {m}", f"{vmax} {cmax}"]
    out.append(" ".join(str(len(x)) for x in vlists))
    out.append(" ".join(str(len(x)) for x in clists))
    out += [pad(x, vmax) for x in vlists]
    out += [pad(x, cmax) for x in clists]
    return "\n".join(out) + "\n"


def builtin_code(key: str) -> LdpcCode:
    if key not in BUILTIN_CODES:
        raise ValueError(f"unknown builtin code {key!r}; choose from {sorted(BUILTIN_CODES)}")
    text = resources.files(__package__).joinpath("data").joinpath(BUILTIN_CODES[key]).read_text()
    return parse_alist(text, name=f"builtin:{key}")


def parse_ldpc_spec(spec: str) -> LdpcCode:
    """``builtin:<name>`` or ``file:<path>`` (a bare path is read as alist)."""
    kind, sep, arg = spec.partition(":")
    if sep and kind == "builtin":
        return builtin_code(arg)
    if sep and kind == "file":
        return load_alist(arg)
    return load_alist(spec)


# --------------------------------------------------------------------------
# encoding / puncturing


def encode(code: LdpcCode, info) -> np.ndarray:
    """Systematic encoding; accepts one info word or a 2-d stack of them."""
    info = gf2.as_bits(info)
    if info.shape[-1] != code.k:
        raise ValueError(f"information length {info.shape[-1]} != k'={code.k}")
    return gf2.matmul(info, code.generator)


def syndrome(code: LdpcCode, word) -> np.ndarray:
    word = gf2.as_bits(word)
    if word.shape[-1] != code.n:
        raise ValueError(f"word length {word.shape[-1]} != n'={code.n}")
    return gf2.matmul(word, code.h.T)


def rate_matching_puncture(code: LdpcCode, count: int) -> tuple[int, ...]:
    """``count`` parity positions spread evenly over the parity set."""
    par = code.parity_positions
    if not 0 <= count <= len(par):
        raise ValueError(f"cannot puncture {count} of {len(par)} parity bits")
    if count == 0:
        return ()
    picks = np.floor((np.arange(count) + 0.5) * len(par) / count).astype(int)
    return tuple(par[i] for i in picks)


def rate_matching_count(n_prime: int, vertical_n: int, vertical_k: int) -> int:
    """Punctured bits per row keeping the product rate equal to the LDPC rate.

    For a (24, 23) single parity-check vertical code this is ceil(n'/24).
    """
    return ceil(n_prime * (vertical_n - vertical_k) / vertical_n)


def apply_puncture(code: LdpcCode, word) -> np.ndarray:
    word = np.asarray(word)
    if not code.puncture_pattern:
        return word
    return np.delete(word, code.puncture_pattern, axis=-1)


def depuncture(code: LdpcCode, values) -> np.ndarray:
    """Re-insert punctured positions as zeros (erasures in the LLR domain)."""
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros(values.shape[:-1] + (code.n,), dtype=np.float64)
    keep = np.ones(code.n, dtype=bool)
    keep[list(code.puncture_pattern)] = False
    out[..., keep] = values
    return out


# --------------------------------------------------------------------------
# belief propagation


@njit(cache=True, nogil=True)
def _syndrome_ok(hard, chk_ptr, edge_var):
    for c in range(chk_ptr.size - 1):
        acc = 0
        for e in range(chk_ptr[c], chk_ptr[c + 1]):
            acc ^= hard[edge_var[e]]
        if acc:
            return False
    return True


@njit(cache=True, nogil=True)
def _bp_kernel(llr, chk_ptr, edge_var, var_ptr, var_edge, max_iters, clamp, post, hard):
    n = llr.size
    n_edges = edge_var.size
    v2c = np.empty(n_edges)
    c2v = np.zeros(n_edges)
    t = np.empty(n_edges)
    for e in range(n_edges):
        v2c[e] = llr[edge_var[e]]
    for v in range(n):
        post[v] = llr[v]
        hard[v] = 1 if llr[v] < 0.0 else 0
    if _syndrome_ok(hard, chk_ptr, edge_var):
        return 0, True
    for it in range(1, max_iters + 1):
        for c in range(chk_ptr.size - 1):
            lo = chk_ptr[c]
            hi = chk_ptr[c + 1]
            acc = 1.0
            for e in range(lo, hi):
                t[e] = np.tanh(0.5 * v2c[e])
                c2v[e] = acc  # product of tanh over edges before e
                acc *= t[e]
            acc = 1.0
            for e in range(hi - 1, lo - 1, -1):
                p = c2v[e] * acc
                acc *= t[e]
                msg = 2.0 * np.arctanh(p)
                if msg > clamp:
                    msg = clamp
                elif msg < -clamp:
                    msg = -clamp
                c2v[e] = msg
        for v in range(n):
            total = llr[v]
            for i in range(var_ptr[v], var_ptr[v + 1]):
                total += c2v[var_edge[i]]
            for i in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge[i]
                msg = total - c2v[e]
                if msg > clamp:
                    msg = clamp
                elif msg < -clamp:
                    msg = -clamp
                v2c[e] = msg
            if total > clamp:
                total = clamp
            elif total < -clamp:
                total = -clamp
            post[v] = total
            hard[v] = 1 if total < 0.0 else 0
        if _syndrome_ok(hard, chk_ptr, edge_var):
            return it, True
    return max_iters, False


def bp_decode(
    code: LdpcCode,
    channel_llrs,
    max_iters: int = DEFAULT_MAX_ITERS,
    clamp: float = DEFAULT_CLAMP,
) -> DecodeOutcome:
    """Flooding sum-product decoding with a syndrome check after every pass.

    Positive LLR favours bit 0; an LLR of exactly zero decides 0.  The
    channel hard decision is checked before the first iteration, so a word
    that already satisfies every check returns with ``iterations == 0``.
    """
    llr = np.clip(np.asarray(channel_llrs, dtype=np.float64), -clamp, clamp)
    if llr.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llr.shape}")
    post = np.empty(code.n)
    hard = np.empty(code.n, dtype=np.uint8)
    iters, ok = _bp_kernel(llr, *code._graph, int(max_iters), float(clamp), post, hard)
    return DecodeOutcome(bool(ok), hard, int(iters), post)


# --------------------------------------------------------------------------
# construction


def make_peg_code(n: int, m: int, var_degree: int, seed: int = 0) -> np.ndarray:
    """Progressive edge-growth parity-check matrix.

    Each new edge of a variable goes to a lowest-degree check among those
    farthest from it in the current graph; remaining ties are broken by a
    seeded RNG.  Check degrees are capped at ceil(n * var_degree / m), which
    makes the result regular whenever m divides n * var_degree.
    """
    rng = np.random.default_rng(seed)
    cap = -(-n * var_degree // m)
    var_adj: list[list[int]] = [[] for _ in range(n)]
    chk_adj: list[list[int]] = [[] for _ in range(m)]
    cdeg = np.zeros(m, dtype=np.int64)

    def pick(cands):
        cands = np.asarray(sorted(cands))
        open_ = cands[cdeg[cands] < cap]
        if open_.size == 0:
            open_ = np.flatnonzero(cdeg < cap)
        cands = open_
        best = cands[cdeg[cands] == cdeg[cands].min()]
        return int(rng.choice(best))

    for v in range(n):
        for j in range(var_degree):
            if j == 0:
                c = pick(range(m))
            else:
                seen_c = set(var_adj[v])
                frontier = set(var_adj[v])
                seen_v = {v}
                while True:
                    nxt_v = {u for c0 in frontier for u in chk_adj[c0]} - seen_v
                    seen_v |= nxt_v
                    nxt_c = {c1 for u in nxt_v for c1 in var_adj[u]} - seen_c
                    if not nxt_c or len(seen_c | nxt_c) == m:
                        break
                    seen_c |= nxt_c
                    frontier = nxt_c
                unreached = set(range(m)) - seen_c
                c = pick(unreached)
            var_adj[v].append(c)
            chk_adj[c].append(v)
            cdeg[c] += 1
    h = np.zeros((m, n), dtype=np.uint8)
    for v, cs in enumerate(var_adj):
        h[cs, v] = 1
    return h
