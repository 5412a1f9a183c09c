"""Soft combining of failed horizontal codewords through vertical checks.

Every row ``j`` of the extended parity-check matrix H_E states that the
XOR of the horizontal codewords it touches is zero.  After the first BP
pass, a row touching one failed codeword recovers it by XOR (case 1).  A
row touching two failed codewords yields a second, independent LLR
observation of one of them, built from the other's received LLRs with
signs flipped by the known codewords (case 2).  Rows touching three or
more failed codewords are handled by boxplus-combining groups (case 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import gf2
from .ldpc import DEFAULT_CLAMP, DEFAULT_MAX_ITERS, DecodeOutcome, LdpcCode, bp_decode, syndrome
from .vertical import VerticalCode

# --------------------------------------------------------------------------
# LLR algebra


def boxplus(a, b, clamp: float = DEFAULT_CLAMP):
    """LLR of the XOR of two bits, ``2 atanh(tanh(a/2) tanh(b/2))``.

    Evaluated in the overflow-free form
    ``sgn(a) sgn(b) min(|a|,|b|) + log1p(e^-|a+b|) - log1p(e^-|a-b|)``.
    An operand at +-clamp stands for a known bit and acts by sign change
    only, so ``boxplus(+clamp, x) == x`` and ``boxplus(-clamp, x) == -x``
    exactly.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )
    out = np.where(np.abs(b) >= clamp, np.sign(b) * a, out)
    out = np.where(np.abs(a) >= clamp, np.sign(a) * b, out)
    out = np.clip(out, -clamp, clamp)
    return float(out) if out.ndim == 0 else out


def boxplus_vectors(vs, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    vs = [np.asarray(v, dtype=np.float64) for v in vs]
    if not vs:
        raise ValueError("need at least one LLR vector")
    if any(v.shape != vs[0].shape for v in vs):
        raise ValueError("length mismatch")
    acc = np.clip(vs[0], -clamp, clamp)
    for v in vs[1:]:
        acc = boxplus(acc, v, clamp)
    return acc


def hard_to_llr(word, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    """Saturated LLRs of a known word: bit 0 -> +clamp, bit 1 -> -clamp."""
    return clamp * (1.0 - 2.0 * gf2.as_bits(word))


# --------------------------------------------------------------------------
# configuration and state


@dataclass(frozen=True)
class ProductCodeConfig:
    vertical: VerticalCode
    horizontal: LdpcCode

    def __post_init__(self):
        if not 0 < self.overall_rate < 1:
            raise ValueError(f"overall rate {self.overall_rate} outside (0, 1)")

    @property
    def overall_rate(self) -> float:
        return self.vertical.rate * self.horizontal.rate


@dataclass(frozen=True)
class CombinePolicy:
    """Knobs of the re-decoding loop.

    ``max_e`` is the largest number of failed codewords in one check that
    is still combined.  ``groupings`` selects the case-3 partitions:
    ``"singleton"`` pits one failed codeword against the rest, ``"all"``
    also tries every larger unordered bipartition.  ``attempt_budget``
    caps combined re-decodes per matrix (``None`` means 4 n).
    """

    max_e: int = 2
    attempt_budget: int | None = None
    use_posteriors: bool = False
    groupings: str = "singleton"
    max_iters: int = DEFAULT_MAX_ITERS
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self):
        if self.max_e < 1:
            raise ValueError("max_e must be at least 1")
        if self.groupings not in ("singleton", "all"):
            raise ValueError("groupings must be 'singleton' or 'all'")
        if self.attempt_budget is not None and self.attempt_budget < 0:
            raise ValueError("attempt_budget must be non-negative")


@dataclass
class SoftMatrix:
    """Received LLR rows of one codeword matrix and their decode outcomes."""

    received: np.ndarray
    outcomes: list[DecodeOutcome]
    config: ProductCodeConfig
    use_posteriors: bool = False

    @property
    def failed(self) -> tuple[int, ...]:
        return tuple(i for i, o in enumerate(self.outcomes) if not o.success)

    def soft(self, i: int) -> np.ndarray:
        """LLRs of row ``i`` used for combining."""
        if self.use_posteriors:
            return self.outcomes[i].final_llrs
        return self.received[i]


@dataclass(frozen=True)
class RedecodePlan:
    """A check chosen for re-decoding.

    ``participants`` are all rows in the check, ``support`` the failed
    ones.  ``grouping`` splits the support into the group whose XOR is
    re-decoded and the complementary group.  ``offset`` is a known word
    the participants XOR to (zero for H_E rows).
    """

    he_row: int
    participants: tuple[int, ...]
    support: tuple[int, ...]
    grouping: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    offset: np.ndarray | None = field(default=None, repr=False)

    @property
    def e_min(self) -> int:
        return len(self.support)

    def with_grouping(self, target: tuple[int, ...]) -> RedecodePlan:
        rest = tuple(i for i in self.support if i not in target)
        if not target or not rest or len(target) + len(rest) != len(self.support):
            raise ValueError("grouping must split the failed support into two nonempty groups")
        return RedecodePlan(self.he_row, self.participants, self.support, (tuple(target), rest), self.offset)


@dataclass(frozen=True)
class Event:
    case: int
    he_row: int
    targets: tuple[int, ...]
    success: bool


@dataclass
class ProductDecodeResult:
    systematic_success: bool
    recovered_rows: np.ndarray
    row_success: np.ndarray
    events: list[Event]
    redecode_attempts: int
    undetectable_anomalies: int

    def case_successes(self, case: int) -> int:
        return sum(1 for ev in self.events if ev.case == case and ev.success)


# --------------------------------------------------------------------------
# the three cases


def _checks_from_he(he: np.ndarray) -> list[tuple[tuple[int, ...], np.ndarray | None]]:
    return [(tuple(int(i) for i in np.flatnonzero(row)), None) for row in he]


def _plan_for(soft: SoftMatrix, j: int, check) -> RedecodePlan:
    participants, offset = check
    failed = set(soft.failed)
    support = tuple(i for i in participants if i in failed)
    return RedecodePlan(j, participants, support, offset=offset)


def select_plan(soft: SoftMatrix, he) -> RedecodePlan | None:
    """Lowest-index H_E row with the fewest (but at least one) failed rows.

    This is the first row of minimum nonzero weight in H_P, the columns of
    H_E at the failed indices.
    """
    failed = soft.failed
    if not failed:
        raise ValueError("no failed rows to plan for")
    hp = gf2.puncture_columns(he, failed)
    best = gf2.min_nonzero_row_weight(hp)
    if best is None:
        return None
    _, j = best
    return _plan_for(soft, j, (tuple(int(i) for i in np.flatnonzero(he[j])), None))


def _known_word(soft: SoftMatrix, plan: RedecodePlan, exclude) -> np.ndarray:
    """XOR of the decoded participants outside ``exclude`` and the offset."""
    n_prime = soft.received.shape[1]
    acc = np.zeros(n_prime, dtype=np.uint8) if plan.offset is None else plan.offset.copy()
    for i in plan.participants:
        if i not in exclude:
            acc ^= soft.outcomes[i].codeword
    return acc


def case1_recover(soft: SoftMatrix, plan: RedecodePlan) -> np.ndarray:
    """Recover the single failed row of the check as the XOR of the others."""
    if plan.e_min != 1:
        raise ValueError("case 1 needs exactly one failed row in the check")
    return _known_word(soft, plan, plan.support)


def _combine(soft: SoftMatrix, plan: RedecodePlan, target: tuple[int, ...], other: tuple[int, ...], clamp: float):
    first = boxplus_vectors([soft.soft(i) for i in target], clamp)
    known = hard_to_llr(_known_word(soft, plan, plan.support), clamp)
    second = boxplus_vectors([soft.soft(i) for i in other] + [known], clamp)
    return np.clip(first + second, -clamp, clamp)


def case2_combine(soft: SoftMatrix, plan: RedecodePlan, target: int, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    """Two observations of ``target`` added in the LLR domain.

    The second observation is the other failed row's LLRs with signs
    flipped wherever the XOR of the decoded participants has a one.
    """
    if plan.e_min != 2:
        raise ValueError("case 2 needs exactly two failed rows in the check")
    if target not in plan.support:
        raise ValueError(f"row {target} is not a failed participant of the check")
    (other,) = (i for i in plan.support if i != target)
    return _combine(soft, plan, (target,), (other,), clamp)


def case3_combine(soft: SoftMatrix, plan: RedecodePlan, clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    """Two observations of the XOR of the target group.

    The target group's LLRs are boxplus-reduced; the complementary group
    is boxplus-reduced together with the decoded participants, and the
    two vectors are added.
    """
    if plan.grouping is None:
        raise ValueError("case 3 needs a grouping of the failed rows")
    target, other = plan.grouping
    if not target or not other:
        raise ValueError("both groups must be nonempty")
    return _combine(soft, plan, target, other, clamp)


def recover_erasures(soft: SoftMatrix, he) -> list[int]:
    """Case-1-only pass: XOR-recover failed rows until no check has exactly
    one failed participant.

    Unlike :func:`product_decode` this also restores parity rows, which
    makes it plain erasure decoding of the vertical code.  Outcomes in
    ``soft`` are updated in place; the recovered row indices are returned
    in recovery order.
    """
    he = gf2.as_bits(he, 2)
    done = []
    while soft.failed:
        plan = select_plan(soft, he)
        if plan is None or plan.e_min != 1:
            break
        (i,) = plan.support
        word = case1_recover(soft, plan)
        soft.outcomes[i] = DecodeOutcome(True, word, 0, hard_to_llr(word))
        done.append(i)
    return done


def _target_groups(support: tuple[int, ...], mode: str):
    yield from ((i,) for i in support)
    if mode == "singleton" or len(support) < 4:
        return
    e = len(support)
    for size in range(2, e // 2 + 1):
        for group in combinations(support, size):
            # at the half split keep one of each complementary pair
            if 2 * size == e and support[0] not in group:
                continue
            yield group


# --------------------------------------------------------------------------
# orchestration


def product_decode(
    received,
    config: ProductCodeConfig,
    policy: CombinePolicy = CombinePolicy(),
    initial: list[DecodeOutcome] | None = None,
) -> ProductDecodeResult:
    """Decode one n x n' matrix of received LLRs.

    Every row is first BP-decoded (``initial`` may supply those outcomes).
    While a systematic row is still failed, checks touching exactly one
    failed row are resolved by XOR; otherwise the checks of minimum
    failed weight are re-decoded from combined LLRs, each success feeding
    back into the loop.  Decoding stops when a full sweep of combined
    attempts brings nothing, the attempt budget is spent, or the minimum
    weight exceeds ``policy.max_e``.
    """
    vert, ldpc = config.vertical, config.horizontal
    received = np.asarray(received, dtype=np.float64)
    if received.shape != (vert.n, ldpc.n):
        raise ValueError(f"expected received shape {(vert.n, ldpc.n)}, got {received.shape}")
    clamp = policy.clamp
    if initial is None:
        initial = [bp_decode(ldpc, row, policy.max_iters, clamp) for row in received]
    soft = SoftMatrix(received, list(initial), config, policy.use_posteriors)
    checks = _checks_from_he(vert.he)
    budget = 4 * vert.n if policy.attempt_budget is None else policy.attempt_budget
    sys_rows = vert.systematic_positions
    events: list[Event] = []
    attempts = anomalies = 0
    rejected: set = set()
    tried: set = set()

    while not all(soft.outcomes[i].success for i in sys_rows):
        failed = set(soft.failed)
        weights = [sum(1 for i in c[0] if i in failed) for c in checks]

        case1 = None
        for j, c in enumerate(checks):
            if weights[j] == 1:
                plan = _plan_for(soft, j, c)
                if (j, plan.support) not in rejected:
                    case1 = plan
                    break
        if case1 is not None:
            word = case1_recover(soft, case1)
            (i,) = case1.support
            ok = not syndrome(ldpc, word).any()
            if ok:
                soft.outcomes[i] = DecodeOutcome(True, word, 0, hard_to_llr(word, clamp))
            else:
                anomalies += 1
                rejected.add((case1.he_row, case1.support))
            events.append(Event(1, case1.he_row, (i,), ok))
            continue

        usable = [w for w in weights if w >= 2]
        if not usable:
            break
        e_min = min(usable)
        if e_min > policy.max_e:
            break
        progressed = exhausted = False
        for j, c in enumerate(checks):
            if weights[j] != e_min:
                continue
            plan = _plan_for(soft, j, c)
            for target in _target_groups(plan.support, policy.groupings):
                key = (j, plan.support, target)
                if key in tried:
                    continue
                if attempts >= budget:
                    exhausted = True
                    break
                tried.add(key)
                attempts += 1
                gplan = plan.with_grouping(target)
                if e_min == 2:
                    llr = case2_combine(soft, gplan, target[0], clamp)
                else:
                    llr = case3_combine(soft, gplan, clamp)
                out = bp_decode(ldpc, llr, policy.max_iters, clamp)
                events.append(Event(2 if e_min == 2 else 3, j, target, out.success))
                if out.success:
                    if len(target) == 1:
                        soft.outcomes[target[0]] = out
                    else:
                        rest = gplan.grouping[1]
                        known = _known_word(soft, plan, plan.support)
                        checks.append((target, out.codeword))
                        checks.append((rest, out.codeword ^ known))
                    progressed = True
                    break
            if progressed or exhausted:
                break
        if not progressed:
            break

    rows = np.array([o.codeword for o in soft.outcomes], dtype=np.uint8)
    ok_rows = np.array([o.success for o in soft.outcomes], dtype=bool)
    return ProductDecodeResult(
        systematic_success=bool(ok_rows[list(sys_rows)].all()),
        recovered_rows=rows,
        row_success=ok_rows,
        events=events,
        redecode_attempts=attempts,
        undetectable_anomalies=anomalies,
    )
