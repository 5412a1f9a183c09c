"""Exhaustive combinability analysis of vertical codes.

A set S of failed rows is *combinable* when some row of H_E, restricted to
S, has weight one or two: that check can then be attacked by XOR recovery
or by two-observation combining.  A code is eps-combinable when every
eps-subset is, and its combined-decodability is the largest eta such that
it is eps-combinable for all eps <= eta.

Subsets are enumerated in lexicographic order as n-bit masks; each H_E row
is a mask too, so the test is ``popcount(row & S) in (1, 2)``.  The work is
split into subset ranges by fixed two-element prefixes, which numba runs
in parallel.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
from numba import njit, prange

from . import gf2
from .vertical import VerticalCode

DEFAULT_BUDGET = 10**9


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class DistributionRow:
    e: int
    total: int
    with_w12: int
    without_w12: int


@dataclass(frozen=True, eq=False)
class HpDistribution:
    code: VerticalCode
    per_e: list[DistributionRow]


@dataclass(frozen=True, eq=False)
class DecodabilityReport:
    code: VerticalCode
    eta: int
    witness: tuple[int, ...] | None


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    applies: bool
    holds: bool
    detail: str


@dataclass(frozen=True, eq=False)
class StructuralReport:
    code: VerticalCode
    combinable: dict[int, bool]
    column_counts: dict[int, int]
    checks: list[LemmaCheck] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(c.holds for c in self.checks if c.applies)


# --------------------------------------------------------------------------
# kernels


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, inline="always")
def _has_w12(rows, mask):
    for r in range(rows.size):
        w = _popcount64(rows[r] & mask)
        if w == np.uint64(1) or w == np.uint64(2):
            return True
    return False


@njit(cache=True)
def _scan_prefix(rows, n, e, prefix, stop_at_first, first_out):
    """Count combinable e-subsets extending ``prefix``.

    With ``stop_at_first`` set, return at the first non-combinable subset
    and write it to ``first_out``; the count is then meaningless.
    Returns (combinable count, total count, found flag).
    """
    p = prefix.size
    r = e - p
    base = np.uint64(0)
    for i in range(p):
        base |= np.uint64(1) << np.uint64(prefix[i])
    start = prefix[p - 1] + 1 if p > 0 else 0
    if r == 0:
        ok = _has_w12(rows, base)
        if not ok and stop_at_first:
            for i in range(p):
                first_out[i] = prefix[i]
            return 0, 1, True
        return (1 if ok else 0), 1, False
    if n - start < r:
        return 0, 0, False
    idx = np.empty(r, dtype=np.int64)
    for i in range(r):
        idx[i] = start + i
    good = 0
    total = 0
    while True:
        mask = base
        for i in range(r):
            mask |= np.uint64(1) << np.uint64(idx[i])
        total += 1
        if _has_w12(rows, mask):
            good += 1
        elif stop_at_first:
            for i in range(p):
                first_out[i] = prefix[i]
            for i in range(r):
                first_out[p + i] = idx[i]
            return good, total, True
        # next combination in lexicographic order
        i = r - 1
        while i >= 0 and idx[i] == n - r + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for t in range(i + 1, r):
            idx[t] = idx[t - 1] + 1
    return good, total, False


@njit(cache=True, parallel=True)
def _count_all(rows, n, e, prefixes):
    good = np.zeros(prefixes.shape[0], dtype=np.int64)
    total = np.zeros(prefixes.shape[0], dtype=np.int64)
    dummy = np.empty(e, dtype=np.int64)
    for t in prange(prefixes.shape[0]):
        g, tot, _ = _scan_prefix(rows, n, e, prefixes[t], False, dummy)
        good[t] = g
        total[t] = tot
    return good.sum(), total.sum()


@njit(cache=True, parallel=True)
def _first_failures(rows, n, e, prefixes):
    found = np.zeros(prefixes.shape[0], dtype=np.bool_)
    firsts = np.zeros((prefixes.shape[0], e), dtype=np.int64)
    for t in prange(prefixes.shape[0]):
        _, _, f = _scan_prefix(rows, n, e, prefixes[t], True, firsts[t])
        found[t] = f
    return found, firsts


def _row_masks(code: VerticalCode) -> np.ndarray:
    if code.n > 64:
        raise ValueError("subset enumeration supports n <= 64")
    return np.array(gf2.pack_rows(code.he), dtype=np.uint64)


def _prefixes(n: int, e: int) -> np.ndarray:
    p = min(2, e)
    pre = [c for c in combinations(range(n), p) if c[-1] <= n - (e - p) - 1]
    return np.array(pre, dtype=np.int64).reshape(len(pre), p)


def _check_budget(n: int, e: int, budget: int) -> int:
    if not 1 <= e <= n:
        raise ValueError(f"e must lie in 1..{n}, got {e}")
    total = comb(n, e)
    if total > budget:
        raise BudgetExceeded(f"C({n},{e}) = {total} subsets exceeds budget {budget}")
    return total


# --------------------------------------------------------------------------
# public operations


def first_uncombinable_subset(code: VerticalCode, eps: int, budget: int = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    """Lexicographically first eps-subset whose H_P has no weight-1/2 row."""
    _check_budget(code.n, eps, budget)
    found, firsts = _first_failures(_row_masks(code), code.n, eps, _prefixes(code.n, eps))
    hits = np.flatnonzero(found)
    if hits.size == 0:
        return None
    return tuple(int(i) for i in firsts[hits[0]])


def is_epsilon_combinable(code: VerticalCode, eps: int, budget: int = DEFAULT_BUDGET) -> bool:
    return first_uncombinable_subset(code, eps, budget) is None


def count_combinable(code: VerticalCode, e: int, budget: int = DEFAULT_BUDGET) -> DistributionRow:
    total = _check_budget(code.n, e, budget)
    good, seen = _count_all(_row_masks(code), code.n, e, _prefixes(code.n, e))
    assert seen == total, (seen, total)
    return DistributionRow(e, total, int(good), total - int(good))


def hp_distribution(code: VerticalCode, e_values, budget: int = DEFAULT_BUDGET) -> HpDistribution:
    e_values = list(e_values)
    for e in e_values:
        _check_budget(code.n, e, budget)
    return HpDistribution(code, [count_combinable(code, e, budget) for e in e_values])


def combined_decodability(code: VerticalCode, budget: int = DEFAULT_BUDGET) -> DecodabilityReport:
    for eps in range(1, code.n + 1):
        witness = first_uncombinable_subset(code, eps, budget)
        if witness is not None:
            return DecodabilityReport(code, eps - 1, witness)
    return DecodabilityReport(code, code.n, None)


def witness_hp(code: VerticalCode, witness) -> np.ndarray:
    return gf2.puncture_columns(code.he, witness)


def check_structural_lemmas(code: VerticalCode, budget: int = DEFAULT_BUDGET) -> StructuralReport:
    """Evaluate the length bounds and column-multiplicity characterisations.

    Each check reports whether its premise applies to this code and, if
    so, whether the stated conclusion holds on the enumerated data.
    """
    n, big_m = code.n, code.big_m
    comb_ = {e: is_epsilon_combinable(code, e, budget) for e in range(1, min(n, 7) + 1)}
    counts = Counter(int(c) for c in gf2.pack_rows(code.h.T))
    every = len(counts) == big_m

    def each_times(t):
        return every and all(v == t for v in counts.values())

    checks = [
        LemmaCheck("1,2-combinable", True, comb_.get(1, True) and comb_.get(2, True),
                   "every code is 1 and 2 combinable"),
    ]
    for eps, times, bound in ((3, 2, 2 * big_m), (4, 3, 3 * big_m)):
        c = comb_.get(eps)
        checks.append(LemmaCheck(f"{eps}-combinable length bound", bool(c), n <= bound,
                                 f"n={n} <= {bound}"))
        if n == bound:
            checks.append(LemmaCheck(
                f"{eps}-combinable at n={bound} iff columns x{times}", True,
                bool(c) == each_times(times),
                f"combinable={c}, each nonzero column {times} times={each_times(times)}"))
    c3, c4 = comb_.get(3), comb_.get(4)
    checks.append(LemmaCheck("3-combinable implies 4-combinable", bool(c3) and c4 is not None,
                             bool(c4), f"3:{c3} 4:{c4}"))
    c5 = comb_.get(5)
    checks.append(LemmaCheck("d_min>=3 5-combinable length bound", bool(c5) and code.d_min >= 3,
                             n <= big_m, f"n={n} <= M={big_m}"))
    if code.d_min >= 3 and n == big_m:
        checks.append(LemmaCheck("5-combinable at n=M iff columns x1", True,
                                 bool(c5) == each_times(1),
                                 f"combinable={c5}, each nonzero column once={each_times(1)}"))
    checks.append(LemmaCheck("5-combinable length bound without d_min (empirical)", bool(c5),
                             n <= 2 * big_m + 2, f"n={n} <= 2M+2={2 * big_m + 2}"))
    if each_times(1):
        checks.append(LemmaCheck("Hamming: not 6 and not 7 combinable", n >= 7,
                                 comb_.get(6) is False and comb_.get(7) is False,
                                 f"6:{comb_.get(6)} 7:{comb_.get(7)}"))
    return StructuralReport(code, comb_, dict(counts), checks)
