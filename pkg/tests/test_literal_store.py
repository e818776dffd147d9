from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rlzap.errors import CorruptArchiveError, InvalidInputError, RangeError
from rlzap.literal_store import DnaLiteralStore, FixedLiteralStore, dna_build, fixed_build, read_store, write_store
from rlzap.wire import Reader, Writer


def roundtrip(store):
    w = Writer()
    write_store(store, w)
    r = Reader(w.getvalue())
    out = read_store(r)
    assert r.at_end()
    return out


def test_mismatch_string_packs_without_exceptions():
    s = dna_build(b"GCCTA")
    assert s.run(0, 5) == b"GCCTA"
    assert s.codes.count == 5 and s.exceptions.ones() == 0
    assert s.exceptions.chunks.ones == 0


def test_n_stored_as_a_and_flagged():
    s = dna_build(b"ANNA")
    assert s.run(0, 4) == b"ANNA"
    assert s.codes.to_list() == [0, 0, 0, 0]
    assert [s.exceptions.get(k) for k in range(4)] == [0, 1, 1, 0]


def test_clustered_ns_round_trip():
    rng = random.Random(1)
    buf = bytearray(rng.choice(b"ACGT") for _ in range(100_000))
    for _ in range(12):
        start = rng.randrange(len(buf) - 500)
        end = start + rng.randrange(1, 500)
        buf[start:end] = b"N" * (end - start)
    data = bytes(buf)
    s = dna_build(data)
    assert all(s[k] == data[k] for k in range(0, len(data)))
    assert roundtrip(s).run(0, len(data)) == data
    # exceptions cost less than a plain bitvector when Ns cluster
    assert s.exceptions.size_bits() <= len(data)
    assert s.size_bits() == 2 * len(data) + s.exceptions.size_bits()


def test_dna_rejects_other_symbols():
    with pytest.raises(InvalidInputError):
        dna_build(b"ACGU")
    with pytest.raises(InvalidInputError):
        dna_build(b"ACGT", chunk_len=4)


def test_dna_range():
    s = dna_build(b"ACGT")
    with pytest.raises(RangeError):
        s.get(4)


def test_fixed_zero_width_one():
    s = fixed_build([0, 0, 0])
    assert s.width == 1 and s.run(0, 3) == [0, 0, 0]


def test_fixed_differenced_lcp_values():
    lcp = [0, 1, 1, 4, 3]
    diffs = [lcp[0]] + [b - a for a, b in zip(lcp, lcp[1:])]
    s = fixed_build(diffs)
    assert s.run(0, len(diffs)) == diffs == [0, 1, 0, 3, -1]
    assert roundtrip(s).run(0, 5) == diffs


def test_fixed_random_values():
    rng = np.random.default_rng(4)
    vals = [int(v) for v in rng.integers(-(2**31), 2**31, 100_000)]
    s = fixed_build(vals)
    assert s.width <= 32
    assert s.run(0, len(vals)) == vals


def test_fixed_range():
    with pytest.raises(RangeError):
        fixed_build([1]).get(1)


@given(st.lists(st.integers(-(2**40), 2**40), max_size=200))
def test_fixed_property(vals):
    assert FixedLiteralStore.build(vals).run(0, len(vals)) == vals


@given(st.binary(max_size=300))
def test_dna_property(raw):
    data = bytes(b"ACGTN"[b % 5] for b in raw)
    assert DnaLiteralStore.build(data, 16).run(0, len(data)) == data


def test_unknown_store_kind():
    with pytest.raises(CorruptArchiveError):
        read_store(Reader(b"\x07"))
