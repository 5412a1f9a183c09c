from __future__ import annotations

from math import ceil

import numpy as np
import pytest

from productldpc import gf2, ldpc
from productldpc.vertical import make_hamming

from conftest import HAMMING7_H


@pytest.fixture(scope="module")
def n96():
    return ldpc.builtin_code("n96")


@pytest.fixture(scope="module")
def n504():
    return ldpc.builtin_code("n504")


def _reference_bp(h, llr, max_iters, clamp):
    """Dense textbook sum-product with the same stopping rule."""
    h = h.astype(bool)
    llr = np.clip(llr, -clamp, clamp)
    hard = (llr < 0).astype(np.uint8)
    if not ((h.astype(int) @ hard) % 2).any():
        return 0, True, hard, llr
    v2c = np.where(h, llr[None, :], 0.0)
    for it in range(1, max_iters + 1):
        t = np.where(h, np.tanh(0.5 * v2c), 1.0)
        c2v = np.zeros_like(v2c)
        for c, v in zip(*np.nonzero(h)):
            others = np.prod(np.delete(t[c], v))
            c2v[c, v] = np.clip(2 * np.arctanh(others), -clamp, clamp)
        total = llr + c2v.sum(axis=0)
        v2c = np.where(h, np.clip(total[None, :] - c2v, -clamp, clamp), 0.0)
        post = np.clip(total, -clamp, clamp)
        hard = (post < 0).astype(np.uint8)
        if not ((h.astype(int) @ hard) % 2).any():
            return it, True, hard, post
    return max_iters, False, hard, post


def test_builtin_codes_are_regular_and_girth_six(n96, n504):
    for code, n in ((n96, 96), (n504, 504)):
        assert code.n == n and code.k == n // 2
        assert set(code.h.sum(axis=0)) == {3} and set(code.h.sum(axis=1)) == {6}
        overlap = code.h.astype(int) @ code.h.T.astype(int)
        np.fill_diagonal(overlap, 0)
        assert overlap.max() <= 1


def test_alist_roundtrip(n96):
    text = ldpc.to_alist(n96.h)
    again = ldpc.parse_alist(text)
    assert np.array_equal(again.h, n96.h)
    # the check-node block is optional
    lines = text.strip().splitlines()
    short = "\n".join(lines[: 4 + n96.n])
    assert np.array_equal(ldpc.parse_alist(short).h, n96.h)


def test_hamming_alist_matches_constructed_row_space():
    text = "7 3\n3 4\n2 2 3 2 1 1 1\n4 4 4\n1 2 0\n2 3 0\n1 2 3\n1 3 0\n1 0 0\n2 0 0\n3 0 0\n"
    code = ldpc.parse_alist(text)
    ref = make_hamming(3).h
    assert np.array_equal(code.h, HAMMING7_H)
    assert gf2.rank(np.vstack([code.h, ref])) == gf2.rank(ref) == 3


@pytest.mark.parametrize(
    "text",
    [
        "",
        "3 2\n2 2\n1 1 1\n2 1\n1 0\n1 2\n",  # missing variable list
        "3 2\n2 2\n1 1 1\n2 2\n1 0\n1 0\n1 0\n",  # degree totals differ
        "3 2\n2 2\n1 1 1\n2 1\n1 0\n5 0\n2 0\n",  # check index out of range
        "3 2\n2 2\n1 1 x\n2 1\n1 0\n1 0\n2 0\n",
        "3 2\n2 2\n1 1 1\n2 1\n1 0\n1 0\n2 0\n1 3\n3 0\n",  # check lists disagree
    ],
)
def test_alist_rejects_malformed(text):
    with pytest.raises(ValueError):
        ldpc.parse_alist(text)


def test_zero_degree_variable_is_flagged():
    code = ldpc.parse_alist("3 1\n1 2\n1 1 0\n2\n1\n1\n0\n")
    assert code.zero_degree_vars == (2,)
    assert code.k == 2


def test_toy_dimension():
    h = np.array([[1, 1, 0, 1, 0, 0], [0, 1, 1, 0, 1, 0], [1, 0, 1, 0, 0, 1]], dtype=np.uint8)
    code = ldpc.LdpcCode(h)
    assert code.k == 3
    assert sorted(code.column_permutation) == list(range(6))


def test_encode_systematic_and_valid(n96, rng):
    info = rng.integers(0, 2, (10, n96.k), dtype=np.uint8)
    words = ldpc.encode(n96, info)
    assert np.array_equal(words[:, list(n96.info_positions)], info)
    assert not ldpc.syndrome(n96, words).any()
    assert not ldpc.encode(n96, np.zeros(n96.k, dtype=np.uint8)).any()
    eye = ldpc.encode(n96, np.eye(n96.k, dtype=np.uint8))
    assert np.array_equal(eye, n96.generator)
    with pytest.raises(ValueError):
        ldpc.encode(n96, np.zeros(n96.k + 1, dtype=np.uint8))


def test_syndrome_detects_flip(n96, rng):
    w = ldpc.encode(n96, rng.integers(0, 2, n96.k, dtype=np.uint8))
    w[5] ^= 1
    assert ldpc.syndrome(n96, w).any()
    assert not ldpc.syndrome(n96, np.zeros(n96.n, dtype=np.uint8)).any()


def test_bp_noiseless_and_degenerate(n96, rng):
    w = ldpc.encode(n96, rng.integers(0, 2, n96.k, dtype=np.uint8))
    out = ldpc.bp_decode(n96, 30.0 * (1 - 2.0 * w))
    assert out.success and out.iterations == 0 and np.array_equal(out.codeword, w)
    # zero LLRs decide all-zero, which is a codeword
    out = ldpc.bp_decode(n96, np.zeros(n96.n))
    assert out.success and not out.codeword.any()


def test_bp_corrects_single_flip(n96, rng):
    w = ldpc.encode(n96, rng.integers(0, 2, n96.k, dtype=np.uint8))
    llr = 6.0 * (1 - 2.0 * w)
    llr[17] = -llr[17]
    out = ldpc.bp_decode(n96, llr)
    assert out.success and out.iterations >= 1 and np.array_equal(out.codeword, w)


def test_bp_matches_reference_implementation(n96, rng):
    for trial in range(6):
        w = ldpc.encode(n96, rng.integers(0, 2, n96.k, dtype=np.uint8))
        llr = 2 * (1 - 2.0 * w + rng.normal(0, 0.8, n96.n)) / 0.64
        it, ok, hard, post = _reference_bp(n96.h, llr, 12, 30.0)
        out = ldpc.bp_decode(n96, llr, max_iters=12)
        assert (out.iterations, out.success) == (it, ok)
        assert np.array_equal(out.codeword, hard)
        np.testing.assert_allclose(out.final_llrs, post, atol=1e-8)


def test_bp_zero_iterations(n96, rng):
    llr = rng.normal(0, 1, n96.n)
    out = ldpc.bp_decode(n96, llr, max_iters=0)
    assert not out.success and out.iterations == 0
    with pytest.raises(ValueError):
        ldpc.bp_decode(n96, np.zeros(5))


def test_puncturing(n96):
    assert ldpc.rate_matching_count(504, 24, 23) == ceil(504 / 24) == 21
    for n in (96, 100, 504):
        assert ldpc.rate_matching_count(n, 24, 23) == ceil(n / 24)
    pat = ldpc.rate_matching_puncture(n96, 4)
    assert len(pat) == 4 and set(pat) <= set(n96.parity_positions)
    p = n96.with_puncture(pat)
    assert p.rate == pytest.approx(48 / 92)
    word = np.arange(96)
    short = ldpc.apply_puncture(p, word)
    assert short.shape == (92,) and not set(pat) & set(short.tolist())
    back = ldpc.depuncture(p, np.ones(92))
    assert (back[list(pat)] == 0).all() and back.sum() == 92
    assert np.array_equal(ldpc.apply_puncture(n96, word), word)
    with pytest.raises(ValueError):
        ldpc.rate_matching_puncture(n96, 49)


def test_punctured_decoding_recovers(n504, rng):
    code = n504.with_puncture(ldpc.rate_matching_puncture(n504, 21))
    w = ldpc.encode(code, rng.integers(0, 2, code.k, dtype=np.uint8))
    llr = 8.0 * (1 - 2.0 * w)
    llr[list(code.puncture_pattern)] = 0.0
    out = ldpc.bp_decode(code, llr)
    assert out.success and np.array_equal(out.codeword, w)


def test_peg_construction_is_seeded_and_regular():
    a = ldpc.make_peg_code(48, 24, 3, seed=7)
    b = ldpc.make_peg_code(48, 24, 3, seed=7)
    assert np.array_equal(a, b)
    assert set(a.sum(axis=0)) == {3} and set(a.sum(axis=1)) == {6}


def test_builtin_data_regenerates():
    # the shipped 96-bit code is reproducible from its recorded seed
    h = ldpc.make_peg_code(96, 48, 3, seed=2028)
    assert np.array_equal(h, ldpc.builtin_code("n96").h)


def test_parse_ldpc_spec(tmp_path, n96):
    path = tmp_path / "c.alist"
    path.write_text(ldpc.to_alist(n96.h))
    assert np.array_equal(ldpc.parse_ldpc_spec(f"file:{path}").h, n96.h)
    assert np.array_equal(ldpc.parse_ldpc_spec(str(path)).h, n96.h)
    with pytest.raises(ValueError):
        ldpc.parse_ldpc_spec("builtin:nope")
