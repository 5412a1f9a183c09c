from __future__ import annotations

import itertools

import numpy as np
import pytest

from productldpc import gf2, ldpc
from productldpc.vertical import (
    compute_d_min,
    encode_columns,
    from_parity_check,
    make_dpc,
    make_hamming,
    make_spc,
    parse_code_spec,
)

from conftest import HAMMING7_H


def _is_codeword(code, word):
    return not gf2.matmul(code.h, np.asarray(word, dtype=np.uint8).reshape(-1, 1)).any()


def test_spc_shapes():
    c = make_spc(24)
    assert (c.n, c.k, c.d_min) == (24, 23, 2)
    assert np.array_equal(make_spc(4).h, [[1, 1, 1, 1]])
    two = make_spc(2)
    assert two.k == 1 and np.array_equal(two.generator(), [[1, 1]])
    with pytest.raises(ValueError):
        make_spc(1)


def test_hamming3_matches_printed_h():
    c = make_hamming(3)
    assert np.array_equal(c.h, HAMMING7_H)
    assert c.systematic_positions == (0, 1, 2, 3)
    assert c.parity_positions == (4, 5, 6)


def test_hamming_parameters():
    c = make_hamming(4)
    assert (c.n, c.k, c.d_min) == (15, 11, 3)
    two = make_hamming(2)
    assert two.n == 3 and two.k == 1
    assert sorted(gf2.pack_rows(two.h.T)) == [1, 2, 3]
    for m in (2, 3, 4, 5, 6):
        cols = gf2.pack_rows(make_hamming(m).h.T)
        assert sorted(cols) == list(range(1, 2**m))
    with pytest.raises(ValueError):
        make_hamming(11)


def test_dpc6_columns_each_twice():
    c = make_dpc(6)
    assert (c.n, c.k) == (6, 4)
    cols = sorted(gf2.pack_rows(c.h.T))
    assert cols == [1, 1, 2, 2, 3, 3]
    assert c.d_min == 2


def test_dpc_codewords_are_multiples_of_generator():
    # every cyclic shift of g(x) = 1 + x + x^2 is a codeword
    for n in (3, 6, 12):
        c = make_dpc(n)
        assert c.k == n - 2
        for s in range(n):
            w = np.zeros(n, dtype=np.uint8)
            w[[s, (s + 1) % n, (s + 2) % n]] = 1
            assert _is_codeword(c, w)
    with pytest.raises(ValueError):
        make_dpc(7)


def test_generator_orthogonal_to_h():
    for c in (make_spc(5), make_hamming(3), make_hamming(4), make_dpc(12)):
        g = c.generator()
        assert gf2.rank(g) == c.k
        assert not gf2.matmul(g, c.h.T).any()


def test_encode_columns_spc():
    info = np.array([[1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=np.uint8)
    out = encode_columns(info, make_spc(4))
    assert np.array_equal(out[3], info[0] ^ info[1] ^ info[2])


def test_encode_columns_hamming_check_equations(rng):
    code = make_hamming(3)
    info = rng.integers(0, 2, (4, 20), dtype=np.uint8)
    s1, s2, s3, s4, p1, p2, p3 = encode_columns(info, code)
    assert not (s1 ^ s3 ^ s4 ^ p1).any()
    assert not (s1 ^ s2 ^ s3 ^ p2).any()
    assert not (s2 ^ s3 ^ s4 ^ p3).any()
    assert not (s3 ^ p1 ^ p2 ^ p3).any()
    assert not encode_columns(np.zeros((4, 6), dtype=np.uint8), code).any()
    with pytest.raises(ValueError):
        encode_columns(info[:3], code)


def test_d_min_exhaustive_against_bruteforce():
    for c, expect in ((make_spc(6), 2), (make_hamming(3), 3), (make_hamming(4), 3), (make_dpc(6), 2)):
        assert compute_d_min(c) == expect == c.d_min
    # independent oracle: smallest weight of a nonzero word with zero syndrome
    c = make_dpc(9)
    best = min(
        w
        for w in range(1, 10)
        for sup in itertools.combinations(range(9), w)
        if _is_codeword(c, np.isin(np.arange(9), sup).astype(np.uint8))
    )
    assert compute_d_min(c) == best == c.d_min


def test_from_parity_check_custom_layout():
    h = np.array([[1, 1, 0, 0], [0, 1, 1, 1]], dtype=np.uint8)
    c = from_parity_check(h, "toy")
    assert c.k == 2 and len(c.parity_positions) == 2
    info = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    out = encode_columns(info, c)
    assert not gf2.matmul(c.h, out).any()
    with pytest.raises(ValueError):
        from_parity_check([[1, 0, 1], [1, 0, 0]])


def test_parse_code_spec(tmp_path):
    assert parse_code_spec("spc:24").n == 24
    assert parse_code_spec("hamming:4").n == 15
    assert parse_code_spec("dpc:12").k == 10
    path = tmp_path / "h.alist"
    path.write_text(ldpc.to_alist(HAMMING7_H))
    c = parse_code_spec(f"file:{path}")
    assert np.array_equal(c.h, HAMMING7_H) and c.d_min == 3
    for bad in ("spc", "spc:x", "foo:3", "dpc:4"):
        with pytest.raises(ValueError):
            parse_code_spec(bad)
