"""Command-line front end: ``productldpc <subcommand> ...``.

Exit codes are 0 on success, 1 when an operation fails, and 2 for usage or
configuration errors.  Tabular results are CSV; every output is written
as UTF-8 text ending in a newline.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import decodability as dec
from . import ldpc as ldpc_mod
from .combiner import CombinePolicy, ProductCodeConfig, product_decode
from .sim import SimConfig, emit_csv, run_sweep
from .vertical import encode_columns, parse_code_spec


class UsageError(Exception):
    pass


def _usage(fn, *args):
    """Call ``fn`` and turn its ValueError into a usage error."""
    try:
        return fn(*args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_e_values(text: str) -> list[int]:
    """``"3..10"`` (inclusive) or ``"2,4,6"``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad e list {text!r}; use a..b or a,b,c") from None


def parse_snr(text: str) -> tuple[float, ...]:
    """``"a:step:b"`` with b included, or a single value."""
    try:
        parts = [float(x) for x in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR range {text!r}") from None
    if len(parts) == 1:
        return (parts[0],)
    if len(parts) != 3 or parts[1] <= 0 or parts[2] < parts[0]:
        raise argparse.ArgumentTypeError(f"bad SNR range {text!r}; use a:step:b with step > 0")
    lo, step, hi = parts
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


def parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = -1
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="productldpc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="H_P weight distribution of a vertical code")
    a.add_argument("--code", required=True, help="spc:<n> | hamming:<m> | dpc:<n> | file:<alist>")
    a.add_argument("--e", required=True, type=parse_e_values, help="a..b or a,b,c")
    a.add_argument("--budget", type=_positive, default=dec.DEFAULT_BUDGET, help="max subsets per e")
    a.add_argument("--emit", type=Path, help="write the CSV here instead of stdout")

    d = sub.add_parser("decodability", help="combined-decodability and a witness subset")
    d.add_argument("--code", required=True)
    d.add_argument("--budget", type=_positive, default=dec.DEFAULT_BUDGET)
    d.add_argument("--structural", action="store_true", help="also report the structural checks")
    d.add_argument("--emit", type=Path)

    s = sub.add_parser("simulate", help="BPSK/AWGN word error rate sweep")
    s.add_argument("--ldpc", default="builtin:n504", help="builtin:<n504|n96> | file:<alist>")
    s.add_argument("--vertical", default="spc:24", help="vertical code spec, or 'none'")
    s.add_argument("--snr", required=True, type=parse_snr, help="Eb/N0 range a:step:b in dB")
    s.add_argument("--trials", required=True, type=_positive, help="matrices per SNR point")
    s.add_argument("--scheme", choices=("baseline", "proposed", "both"), default="both")
    s.add_argument("--max-e", type=_positive, default=2)
    s.add_argument("--attempt-budget", type=_nonneg)
    s.add_argument("--use-posteriors", type=parse_bool, default=False)
    s.add_argument("--groupings", choices=("singleton", "all"), default="singleton")
    s.add_argument("--max-iters", type=_nonneg, default=ldpc_mod.DEFAULT_MAX_ITERS)
    s.add_argument("--max-errors", type=_nonneg, default=100, help="0 disables early stopping")
    s.add_argument("--rate-match", type=parse_bool, default=True)
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)
    s.add_argument("--out", type=Path)

    e = sub.add_parser("encode", help="encode information words (rows of 0/1)")
    e.add_argument("--ldpc", required=True)
    e.add_argument("--vertical", help="also encode down the columns")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--info", type=Path, help="file of information words, one per line")
    src.add_argument("--random", type=_positive, metavar="ROWS", help="draw this many random words")
    e.add_argument("--seed", type=_nonneg, default=0)
    e.add_argument("--out", type=Path)

    c = sub.add_parser("decode", help="BP (or product) decoding of an LLR file")
    c.add_argument("--ldpc", required=True)
    c.add_argument("--llr", required=True, type=Path, help="whitespace-separated LLRs, one word per line")
    c.add_argument("--vertical", help="decode the rows as one product matrix")
    c.add_argument("--max-iters", type=_nonneg, default=ldpc_mod.DEFAULT_MAX_ITERS)
    c.add_argument("--max-e", type=_positive, default=2)
    c.add_argument("--out", type=Path)
    return p


def parse_args(argv=None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


# --------------------------------------------------------------------------
# subcommands


def _write(text: str, path: Path | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _read_rows(path: Path, dtype) -> np.ndarray:
    lines = [ln.split() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or len({len(ln) for ln in lines}) != 1:
        raise UsageError(f"{path}: expected equal-length rows")
    try:
        return np.array(lines, dtype=dtype)
    except ValueError:
        raise UsageError(f"{path}: non-numeric entry") from None


def _bits(row) -> str:
    return "".join(str(int(b)) for b in row)


def cmd_analyze(args) -> int:
    code = _usage(parse_code_spec, args.code)
    for e in args.e:
        if not 1 <= e <= code.n:
            raise UsageError(f"e={e} outside 1..{code.n}")
    dist = dec.hp_distribution(code, args.e, args.budget)
    lines = ["code,n,k,e,total,with_w12,without_w12"]
    lines += [f"{code.name},{code.n},{code.k},{r.e},{r.total},{r.with_w12},{r.without_w12}" for r in dist.per_e]
    _write("\n".join(lines), args.emit)
    return 0


def cmd_decodability(args) -> int:
    code = _usage(parse_code_spec, args.code)
    rep = dec.combined_decodability(code, args.budget)
    lines = [f"code {code.name} n={code.n} k={code.k} d_min={code.d_min}", f"eta {rep.eta}"]
    if rep.witness is None:
        lines.append("witness none (every subset is combinable)")
    else:
        lines.append("witness " + ",".join(str(i) for i in rep.witness))
        lines.append("H_P rows:")
        lines += ["  " + _bits(r) for r in dec.witness_hp(code, rep.witness)]
    if args.structural:
        st = dec.check_structural_lemmas(code, args.budget)
        lines.append("combinable " + " ".join(f"{e}:{int(v)}" for e, v in st.combinable.items()))
        for chk in st.checks:
            state = ("holds" if chk.holds else "FAILS") if chk.applies else "n/a"
            lines.append(f"check {chk.name}: {state} ({chk.detail})")
    _write("\n".join(lines), args.emit)
    return 0


def cmd_simulate(args) -> int:
    vertical = None if args.vertical.lower() == "none" else args.vertical
    schemes = ("baseline", "proposed") if args.scheme == "both" else (args.scheme,)

    def build():
        policy = CombinePolicy(max_e=args.max_e, attempt_budget=args.attempt_budget,
                               use_posteriors=args.use_posteriors, groupings=args.groupings,
                               max_iters=args.max_iters)
        cfg = SimConfig(args.ldpc, vertical, args.snr, args.trials, max_iters=args.max_iters,
                        policy=policy, seed=args.seed, schemes=schemes, rate_match=args.rate_match,
                        max_errors=args.max_errors, threads=args.threads)
        # resolve the code specs now so bad specs count as usage errors
        ldpc_mod.parse_ldpc_spec(cfg.ldpc)
        if vertical is not None:
            parse_code_spec(vertical)
        return cfg

    try:
        cfg = _usage(build)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    _write(emit_csv(run_sweep(cfg)), args.out)
    return 0


def cmd_encode(args) -> int:
    code = _usage(ldpc_mod.parse_ldpc_spec, args.ldpc)
    vert = _usage(parse_code_spec, args.vertical) if args.vertical else None
    if args.info is not None:
        info = _read_rows(args.info, np.int64)
        if not np.isin(info, (0, 1)).all():
            raise UsageError("information words must be 0/1")
        info = info.astype(np.uint8)
    else:
        rng = np.random.default_rng(args.seed)
        info = rng.integers(0, 2, size=(args.random, code.k), dtype=np.uint8)
    if info.shape[1] != code.k:
        raise UsageError(f"information words need {code.k} bits, got {info.shape[1]}")
    if vert is not None and info.shape[0] != vert.k:
        raise UsageError(f"{vert.name} needs {vert.k} information rows, got {info.shape[0]}")
    rows = ldpc_mod.encode(code, info)
    if vert is not None:
        rows = encode_columns(rows, vert)
    _write("\n".join(" ".join(str(int(b)) for b in r) for r in rows), args.out)
    return 0


def cmd_decode(args) -> int:
    code = _usage(ldpc_mod.parse_ldpc_spec, args.ldpc)
    llrs = _read_rows(args.llr, np.float64)
    if llrs.shape[1] != code.n:
        raise UsageError(f"LLR rows need {code.n} values, got {llrs.shape[1]}")
    lines = ["row,success,iterations,codeword"]
    if args.vertical:
        vert = _usage(parse_code_spec, args.vertical)
        if llrs.shape[0] != vert.n:
            raise UsageError(f"{vert.name} needs {vert.n} rows, got {llrs.shape[0]}")
        cfg = _usage(ProductCodeConfig, vert, code)
        res = product_decode(llrs, cfg, CombinePolicy(max_e=args.max_e, max_iters=args.max_iters))
        for i, (ok, word) in enumerate(zip(res.row_success, res.recovered_rows)):
            lines.append(f"{i},{int(ok)},,{_bits(word)}")
        lines.append(f"# systematic_success={int(res.systematic_success)} "
                     f"redecode_attempts={res.redecode_attempts} "
                     + " ".join(f"case{c}={res.case_successes(c)}" for c in (1, 2, 3)))
    else:
        for i, row in enumerate(llrs):
            out = ldpc_mod.bp_decode(code, row, args.max_iters)
            lines.append(f"{i},{int(out.success)},{out.iterations},{_bits(out.codeword)}")
    _write("\n".join(lines), args.out)
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "decodability": cmd_decodability,
    "simulate": cmd_simulate,
    "encode": cmd_encode,
    "decode": cmd_decode,
}


def dispatch(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"productldpc {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"productldpc {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
