"""BPSK / AWGN Monte Carlo comparison of plain LDPC decoding and product
decoding.

Every trial draws one codeword matrix.  Its random stream is seeded from
``(seed, snr index, trial index)`` alone, so the baseline and the proposed
decoder see the same matrices and the same noise, and results do not
depend on the number of worker threads.
"""

from __future__ import annotations

import dataclasses
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ldpc as ldpc_mod
from .combiner import CombinePolicy, ProductCodeConfig, product_decode
from .ldpc import DEFAULT_CLAMP, LdpcCode, bp_decode
from .vertical import VerticalCode, encode_columns, parse_code_spec

SCHEMES = ("baseline", "proposed")


@dataclass(frozen=True)
class SimConfig:
    ldpc: str
    vertical: str | None
    snr_db_points: tuple[float, ...]
    trials: int
    max_iters: int = ldpc_mod.DEFAULT_MAX_ITERS
    policy: CombinePolicy = CombinePolicy()
    seed: int = 0
    schemes: tuple[str, ...] = ("proposed",)
    rate_match: bool = True
    max_errors: int = 100
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.snr_db_points or not all(np.isfinite(self.snr_db_points)):
            raise ValueError("SNR points must be finite")
        bad = set(self.schemes) - set(SCHEMES)
        if bad or not self.schemes:
            raise ValueError(f"unknown scheme(s) {sorted(bad)}")
        if "proposed" in self.schemes and self.vertical is None:
            raise ValueError("the proposed scheme needs a vertical code")
        if self.max_errors < 0 or self.threads < 1:
            raise ValueError("max_errors must be >= 0 and threads >= 1")


@dataclass
class WerRecord:
    scheme: str
    snr_db: float
    matrices: int = 0
    systematic_words: int = 0
    word_errors: int = 0
    bit_errors: int = 0
    undetected: int = 0
    redecode_attempts: int = 0
    case1: int = 0
    case2: int = 0
    case3: int = 0
    info_bits_per_word: int = field(default=0, repr=False)

    @property
    def wer(self) -> float:
        return self.word_errors / self.systematic_words if self.systematic_words else 0.0

    @property
    def ber(self) -> float:
        nbits = self.systematic_words * self.info_bits_per_word
        return self.bit_errors / nbits if nbits else 0.0


def channel_llr(bits, snr_db: float, rate: float, rng, puncture=(), clamp: float = DEFAULT_CLAMP) -> np.ndarray:
    """BPSK over AWGN at the given Eb/N0, returned as clamped channel LLRs.

    Bit b is sent as 1 - 2b with noise variance 1 / (2 rate 10^(snr/10)).
    Positions listed in ``puncture`` (last axis) are not sent; their LLR
    is 0.
    """
    if not 0 < rate <= 1:
        raise ValueError("rate must lie in (0, 1]")
    bits = np.asarray(bits, dtype=np.uint8)
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0))
    keep = np.ones(bits.shape[-1], dtype=bool)
    keep[list(puncture)] = False
    sent = bits[..., keep]
    a = 1.0 - 2.0 * sent + rng.normal(0.0, np.sqrt(sigma2), size=sent.shape)
    llr = np.zeros(bits.shape, dtype=np.float64)
    llr[..., keep] = np.clip(2.0 * a / sigma2, -clamp, clamp)
    return llr


@dataclass
class _Setup:
    ldpc: LdpcCode
    vertical: VerticalCode | None
    rate: float
    policy: CombinePolicy

    @property
    def sys_rows(self) -> tuple[int, ...]:
        return (0,) if self.vertical is None else self.vertical.systematic_positions


def _setup(config: SimConfig) -> _Setup:
    code = ldpc_mod.parse_ldpc_spec(config.ldpc)
    vert = None if config.vertical is None else parse_code_spec(config.vertical)
    if vert is not None and config.rate_match:
        count = ldpc_mod.rate_matching_count(code.n, vert.n, vert.k)
        code = code.with_puncture(ldpc_mod.rate_matching_puncture(code, count))
    rate = code.rate if vert is None else ProductCodeConfig(vert, code).overall_rate
    policy = dataclasses.replace(config.policy, max_iters=config.max_iters)
    return _Setup(code, vert, rate, policy)


def _trial(setup: _Setup, config: SimConfig, snr_idx: int, trial_idx: int) -> dict[str, dict[str, int]]:
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(snr_idx, trial_idx)))
    code, vert = setup.ldpc, setup.vertical
    snr = config.snr_db_points[snr_idx]
    nsys = 1 if vert is None else vert.k
    info = rng.integers(0, 2, size=(nsys, code.k), dtype=np.uint8)
    rows = ldpc_mod.encode(code, info)
    tx = rows if vert is None else encode_columns(rows, vert)
    clamp = setup.policy.clamp
    llrs = channel_llr(tx, snr, setup.rate, rng, code.puncture_pattern, clamp)
    first = [bp_decode(code, r, config.max_iters, clamp) for r in llrs]
    info_pos = list(code.info_positions)
    out = {}
    for scheme in config.schemes:
        stats = dict(word_errors=0, bit_errors=0, undetected=0, redecode_attempts=0, case1=0, case2=0, case3=0)
        if scheme == "baseline":
            final = np.array([o.codeword for o in first])
            ok = np.array([o.success for o in first])
        else:
            res = product_decode(
                llrs, ProductCodeConfig(vert, code), setup.policy, initial=first
            )
            final, ok = res.recovered_rows, res.row_success
            stats["redecode_attempts"] = res.redecode_attempts
            for c in (1, 2, 3):
                stats[f"case{c}"] = res.case_successes(c)
        for i in setup.sys_rows:
            wrong = final[i] != tx[i]
            if wrong.any():
                stats["word_errors"] += 1
                stats["bit_errors"] += int(wrong[info_pos].sum())
                if ok[i]:
                    stats["undetected"] += 1
        out[scheme] = stats
    return out


def run_sweep(config: SimConfig) -> list[WerRecord]:
    """Simulate every SNR point; one record per (scheme, SNR) pair.

    A point stops early once the first listed scheme (the baseline when
    both are run) has ``max_errors`` word errors, checked trial by trial
    so the stopping trial does not depend on threading.
    """
    setup = _setup(config)
    ref = config.schemes[0]
    records = []
    chunk = max(4 * config.threads, 1)
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        for si, snr in enumerate(config.snr_db_points):
            recs = {s: WerRecord(s, float(snr), info_bits_per_word=setup.ldpc.k) for s in config.schemes}
            done = False
            for start in range(0, config.trials, chunk):
                idx = range(start, min(start + chunk, config.trials))
                results = pool.map(lambda t: _trial(setup, config, si, t), idx)
                for res in results:
                    for s, stats in res.items():
                        r = recs[s]
                        r.matrices += 1
                        r.systematic_words += len(setup.sys_rows)
                        for key, val in stats.items():
                            setattr(r, key, getattr(r, key) + val)
                    if config.max_errors and recs[ref].word_errors >= config.max_errors:
                        done = True
                        break
                if done:
                    break
            records.extend(recs[s] for s in config.schemes)
    return records


CSV_HEADER = (
    "scheme,snr_db,matrices,systematic_words,word_errors,wer,bit_errors,ber,"
    "undetected,redecode_attempts,case1,case2,case3"
)


def emit_csv(records) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        vals = [
            r.scheme, f"{r.snr_db:.6g}", r.matrices, r.systematic_words, r.word_errors,
            f"{r.wer:.6g}", r.bit_errors, f"{r.ber:.6g}", r.undetected,
            r.redecode_attempts, r.case1, r.case2, r.case3,
        ]
        buf.write(",".join(str(v) for v in vals) + "\n")
    return buf.getvalue()


def parse_csv(text: str) -> list[dict[str, str]]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("not a sweep CSV")
    keys = lines[0].split(",")
    return [dict(zip(keys, ln.split(","))) for ln in lines[1:]]
