from __future__ import annotations

import random

import numpy as np
import pytest

from conftest import REF, TGT, brute_match
from rlzap.baselines import (
    baseline_size_bits,
    gdc_access,
    gdc_parse,
    relptr_access,
    relptr_build,
    relptr_from_pointers,
    rlz_access,
    rlz_parse,
)
from rlzap.errors import InvalidInputError, RangeError, ReferenceMismatchError
from rlzap.succinct import unzigzag
from rlzap.synth import MutationRates, genome_collection, mutate, random_ints


def bits_of(sv, n):
    return "".join(str(sv[i]) for i in range(n))


def test_rlz_worked_example():
    x = rlz_parse(TGT, REF)
    texts = [TGT[s : s + n].decode() for s, n, _ in x.phrases()]
    assert texts == ["ACAT", "GA", "TTCGA", "CGA", "CAGGTA", "CTA", "GCTACAGT", "AGAA"]
    # sources, 1-based
    assert [q + 1 for q in x.Q.to_list()] == [1, 10, 7, 9, 15, 24, 23, 32]
    assert bits_of(x.B, len(TGT)) == "10001010000100100000100100000001000"
    # S[25] with 1-based positions: rank 7, select 24
    assert x.B.rank(25) == 7 and x.B.select(7) + 1 == 24
    assert chr(rlz_access(x, REF, 24)) == "C"


def test_gdc_greedy_on_worked_example():
    g = gdc_parse(TGT, REF)
    texts = [TGT[s : s + n].decode() for s, n, _ in g.phrases()]
    assert texts == ["ACATG", "ATTCGAC", "GACAGGTAC", "TAGCTACAGTA", "GAA"]
    assert [q + 1 for q in g.Q.to_list()] == [1, 6, 13, 21, 33]
    assert bytes(g.M.run(0, 5)) == b"GCCAA"
    assert bits_of(g.B, len(TGT)) == "00001000000100000000100000000001001"
    assert chr(gdc_access(g, REF, 24)) == "C"


def test_gdc_fourth_phrase_must_extend():
    # S[22..31] (1-based) occurs in R, so a greedy phrase starting at 22
    # cannot close with a mismatch at 31
    assert TGT[21:31] in REF
    assert brute_match(TGT, REF, 21)[0] == 10


def test_relptr_worked_example():
    x = relptr_build(gdc_parse(TGT, REF))
    assert [unzigzag(v) for v in x.V.to_list()] == [0, -1, 0]
    assert str(x.L) == "10011"
    assert [x.D(k) for k in range(5)] == [0, 0, 0, -1, 0]
    assert chr(relptr_access(x, REF, 24)) == "C"


def test_relptr_from_given_pointers():
    g = gdc_parse(TGT, REF)
    x = relptr_from_pointers(g, [0, 0, 0, -1, 0])
    assert str(x.L) == "10011"


@pytest.mark.parametrize("build", ["rlz", "gdc", "relptr"])
def test_round_trip_and_ranges(build):
    ref, tgt = genome_collection(3000, 2, MutationRates(0.02, 0.003, 0.003, 0.002), seed=7)
    x = {"rlz": lambda: rlz_parse(tgt, ref), "gdc": lambda: gdc_parse(tgt, ref),
         "relptr": lambda: relptr_build(gdc_parse(tgt, ref))}[build]()
    assert x.decode(ref) == tgt
    r = random.Random(3)
    for _ in range(300):
        i = r.randrange(len(tgt))
        length = r.randrange(0, min(200, len(tgt) - i) + 1)
        assert x.extract(ref, i, length) == tgt[i : i + length]
        assert x.access(ref, i) == tgt[i]
    with pytest.raises(RangeError):
        x.access(ref, len(tgt))
    with pytest.raises(RangeError):
        x.extract(ref, len(tgt) - 1, 2)
    with pytest.raises(ReferenceMismatchError):
        x.access(ref[:-1] + b"N", 0)


def test_integer_baselines():
    rng = np.random.default_rng(3)
    ref = random_ints(2000, rng)
    tgt = mutate(ref, MutationRates(0.02, 0.003, 0.003), rng)
    g = gdc_parse(tgt, ref)
    assert g.decode(ref) == tgt
    assert relptr_build(g).decode(ref) == tgt


def test_rlz_needs_every_symbol():
    with pytest.raises(InvalidInputError):
        rlz_parse(b"ACGN", b"ACGT")


def test_gdc_handles_absent_symbols():
    g = gdc_parse(b"NNACGTNN", b"ACGT")
    assert g.decode(b"ACGT") == b"NNACGTNN"
    assert relptr_build(g).decode(b"ACGT") == b"NNACGTNN"


def test_size_report():
    x = rlz_parse(TGT, REF)
    sizes = baseline_size_bits(x)
    assert sizes["total"] == sizes["pointers"] + sizes["bitvectors"] == x.size_bits()
    st = x.stats()
    assert st["phrases"] == 8 and st["scheme"] == "rlz"


def test_compression_order_with_indels():
    ref, tgt = genome_collection(1 << 16, 2, MutationRates(), seed=3)
    sizes = {
        "rlz": rlz_parse(tgt, ref).size_bits(),
        "gdc": gdc_parse(tgt, ref).size_bits(),
        "relptr": relptr_build(gdc_parse(tgt, ref)).size_bits(),
    }
    assert sizes["relptr"] < sizes["gdc"] < sizes["rlz"]
