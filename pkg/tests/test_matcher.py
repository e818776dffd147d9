from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REF, TGT, brute_match
from rlzap.matcher import Matcher, ReferenceIndex, encode_pair, matching_statistics, suffix_array


def naive_sa(codes):
    codes = list(codes)
    return sorted(range(len(codes)), key=lambda i: codes[i:])


@pytest.mark.parametrize("text", [b"", b"a", b"banana", b"mississippi", b"aaaaaaaa", b"abababab"])
def test_suffix_array_small(text):
    assert suffix_array(np.frombuffer(text, dtype=np.uint8)).tolist() == naive_sa(text)


def test_suffix_array_random():
    rng = np.random.default_rng(3)
    for n in (50, 500, 2000):
        codes = rng.integers(0, 3, n).astype(np.uint8)
        assert suffix_array(codes).tolist() == naive_sa(codes.tolist())


def test_worked_example_first_match():
    ms = matching_statistics(TGT, REF)
    assert ms.match_len[0] == 4
    assert REF[ms.rel_ptr[0] : ms.rel_ptr[0] + 4] == b"ACAT"


def test_identical_sequences_match_in_place():
    rng = random.Random(2)
    s = bytes(rng.choice(b"ACGT") for _ in range(300))
    ms = matching_statistics(s, s)
    # any equally long source is acceptable, so only lengths are fixed
    assert list(ms.match_len) == [300 - i for i in range(300)]
    assert ms.rel_ptr[0] == 0


def test_absent_symbol_gets_zero():
    ms = matching_statistics(b"ACGTN", b"ACGT")
    assert ms.match_len[4] == 0 and ms.rel_ptr[4] == 0


def _check_against_brute(target, reference):
    ms = matching_statistics(target, reference)
    for i in range(len(target)):
        assert (ms.match_len[i], ms.rel_ptr[i]) == brute_match(target, reference, i), i


@pytest.mark.parametrize("seed", range(6))
def test_dna_against_brute_force(seed):
    rng = random.Random(seed)
    ref = bytes(rng.choice(b"ACGT") for _ in range(rng.randrange(1, 200)))
    tgt = bytearray(ref[rng.randrange(len(ref)) :] + bytes(rng.choice(b"ACGT") for _ in range(40)))
    for _ in range(5):
        if tgt:
            tgt[rng.randrange(len(tgt))] = rng.choice(b"ACGTN")
    _check_against_brute(bytes(tgt), ref)


@pytest.mark.parametrize("seed", range(4))
def test_integers_against_brute_force(seed):
    rng = random.Random(100 + seed)
    # values wide enough to need multi-byte codes, including negatives
    pool = [-70000, -3, -1, 0, 1, 2, 255, 256, 1 << 20]
    ref = [rng.choice(pool) for _ in range(150)]
    tgt = ref[30:90] + [rng.choice(pool + [12345]) for _ in range(30)]
    _check_against_brute(tgt, ref)


@settings(max_examples=80, deadline=None)
@given(st.binary(min_size=1, max_size=60), st.binary(min_size=1, max_size=60))
def test_maximal_and_leftmost(ref, tgt):
    alphabet = b"AC"
    ref = bytes(alphabet[b % 2] for b in ref)
    tgt = bytes(alphabet[b % 2] for b in tgt)
    _check_against_brute(tgt, ref)


def test_encode_pair_preserves_order():
    t, r, width = encode_pair([-5, 3, 0], [0, -5, 70000])
    assert width == 1
    assert list(t) == [0, 2, 1] and list(r) == [1, 0, 3]
    wide = list(range(-200, 200))
    t, r, width = encode_pair(wide, [0])
    assert width == 2
    codes = [int.from_bytes(t[k : k + 2], "big") for k in range(0, len(t), 2)]
    assert codes == sorted(codes)


def test_lazy_matcher_cache_and_forget():
    m = Matcher(TGT, REF)
    assert m(0) == brute_match(TGT, REF, 0)
    m.forget_before(10)
    assert m(20) == brute_match(TGT, REF, 20)
    assert len(m) == len(TGT)


def test_shared_index():
    _, codes, width = encode_pair(TGT, REF)
    idx = ReferenceIndex(codes, width)
    m = Matcher(TGT, REF, index=idx)
    assert [m(i) for i in range(len(TGT))] == [brute_match(TGT, REF, i) for i in range(len(TGT))]
