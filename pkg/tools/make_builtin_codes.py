"""Regenerate the bundled alist files (deterministic PEG constructions)."""

from pathlib import Path

from productldpc import ldpc

DATA = Path(__file__).resolve().parents[1] / "src" / "productldpc" / "data"

# (n, m, variable degree, seed); seeds chosen so the Tanner graph has no 4-cycles
CODES = {
    "peg_504_252.alist": (504, 252, 3, 2024),
    "peg_96_48.alist": (96, 48, 3, 2028),
}

if __name__ == "__main__":
    for fname, (n, m, dv, seed) in CODES.items():
        h = ldpc.make_peg_code(n, m, dv, seed=seed)
        (DATA / fname).write_text(ldpc.to_alist(h))
        print(f"wrote {fname}: {m}x{n}")
