from __future__ import annotations

import random
import zlib

import numpy as np
import pytest

from conftest import REF, TGT
from rlzap import io
from rlzap.archive import RlzapArchive
from rlzap.baselines import gdc_parse, relptr_build, rlz_parse
from rlzap.errors import (
    BadMagicError,
    CorruptArchiveError,
    FormatError,
    IngestionError,
    TruncatedError,
    UnsupportedVersionError,
)
from rlzap.parser import ParseParams
from rlzap.synth import MutationRates, genome_collection, mutate, random_ints

SMALL = ParseParams(delta_bits=2, look_ahead=4, min_explicit_length=4, max_lit=4, sample_interval=2)


def build_all(tgt, ref, params):
    g = gdc_parse(tgt, ref)
    return {
        "rlzap": RlzapArchive.compress(tgt, ref, params),
        "rlz": rlz_parse(tgt, ref),
        "gdc": g,
        "relptr": relptr_build(g),
    }


@pytest.fixture(scope="module")
def dna_archives():
    ref, tgt = genome_collection(4000, 2, MutationRates(0.02, 0.003, 0.003, 0.003), seed=17)
    return ref, tgt, build_all(tgt, ref, ParseParams.dna(sample_interval=8))


@pytest.fixture(scope="module")
def int_archives():
    rng = np.random.default_rng(6)
    ref = random_ints(3000, rng, spread=500)
    tgt = mutate(ref, MutationRates(0.03, 0.003, 0.003, 0.003), rng)
    g = gdc_parse(tgt, ref)
    return ref, tgt, {"rlzap": RlzapArchive.compress(tgt, ref, ParseParams.dlcp()), "gdc": g, "relptr": relptr_build(g)}


def same_answers(a, b, ref, n, seed=0):
    r = random.Random(seed)
    for _ in range(300):
        i = r.randrange(n)
        length = r.randrange(0, min(300, n - i) + 1)
        assert a.extract(ref, i, length) == b.extract(ref, i, length)
        assert a.access(ref, i) == b.access(ref, i)
    assert a.decode(ref) == b.decode(ref)


@pytest.mark.parametrize("scheme", ["rlzap", "rlz", "gdc", "relptr"])
def test_round_trip_dna(dna_archives, scheme):
    ref, tgt, archives = dna_archives
    a = archives[scheme]
    data = io.serialize(a)
    b = io.deserialize(data)
    assert b.scheme == scheme and b.alphabet == "dna" and b.target_len == len(tgt)
    same_answers(a, b, ref, len(tgt))
    assert b.decode(ref) == tgt
    assert io.serialize(b) == data


@pytest.mark.parametrize("scheme", ["rlzap", "gdc", "relptr"])
def test_round_trip_int(int_archives, scheme):
    ref, tgt, archives = int_archives
    a = archives[scheme]
    data = io.serialize(a)
    b = io.deserialize(data)
    assert b.alphabet == "int"
    same_answers(a, b, ref, len(tgt))
    assert io.serialize(b) == data


def test_params_survive(dna_archives):
    a = dna_archives[2]["rlzap"]
    h = io.read_header(io.serialize(a))
    assert h.params == a.params
    assert h.scheme == "rlzap" and h.header_len < h.total_len
    assert set(h.section_sizes()) == set(io.SECTION_NAMES["rlzap"].values())


@pytest.mark.parametrize("scheme", ["rlzap", "rlz", "gdc", "relptr"])
def test_every_truncation_rejected(scheme):
    archives = build_all(TGT, REF, SMALL)
    data = io.serialize(archives[scheme])
    for cut in range(len(data)):
        with pytest.raises(FormatError):
            io.deserialize(data[:cut])
    assert io.deserialize(data).decode(REF) == TGT


def test_truncation_is_reported_as_such():
    data = io.serialize(RlzapArchive.compress(TGT, REF, SMALL))
    for cut in (0, 3, 10, len(data) // 2, len(data) - 1):
        with pytest.raises(TruncatedError):
            io.deserialize(data[:cut])


def test_bad_magic_and_version():
    data = bytearray(io.serialize(RlzapArchive.compress(TGT, REF, SMALL)))
    with pytest.raises(BadMagicError):
        io.deserialize(b"GZIP!" + bytes(data[5:]))
    with pytest.raises(BadMagicError):
        io.deserialize(b"XY")
    data[5] = 9
    with pytest.raises(UnsupportedVersionError):
        io.deserialize(bytes(data))


def test_every_single_byte_flip_rejected():
    data = io.serialize(RlzapArchive.compress(TGT, REF, SMALL))
    for k in range(len(data)):
        bad = bytearray(data)
        bad[k] ^= 0x10
        with pytest.raises(FormatError):
            io.deserialize(bytes(bad))


def test_trailing_bytes_rejected():
    data = io.serialize(rlz_parse(TGT, REF))
    with pytest.raises(CorruptArchiveError):
        io.deserialize(data + b"\0")


def test_consistent_crc_but_bad_payload():
    # a payload that passes the CRC but breaks a section invariant
    data = bytearray(io.serialize(RlzapArchive.compress(TGT, REF, SMALL)))
    h = io.read_header(bytes(data))
    off, length = h.sections[2]
    body = data[:-4]
    body[off : off + length] = b"\xff" * length
    fixed = bytes(body) + zlib.crc32(bytes(body)).to_bytes(4, "little")
    with pytest.raises(FormatError):
        io.deserialize(fixed)


def test_empty_target_archive():
    a = RlzapArchive.compress(b"", REF, alphabet="dna")
    b = io.deserialize(io.serialize(a))
    assert b.target_len == 0 and b.decode(REF) == b""
    assert io.serialize(b) == io.serialize(a)


def test_save_and_load(tmp_path):
    a = RlzapArchive.compress(TGT, REF, SMALL)
    path = tmp_path / "x.rlzap"
    n = io.save(a, path)
    assert n == path.stat().st_size
    assert io.load(path).extract(REF, 20, 5) == b"CTAGC"


def test_dna_dataset_normalizes_case(tmp_path):
    p = tmp_path / "s.dna"
    p.write_bytes(b"acgtnACGTN")
    assert io.read_dataset(p, io.DNA_BYTES) == b"ACGTNACGTN"


def test_dna_dataset_bad_byte_offset(tmp_path):
    p = tmp_path / "s.dna"
    p.write_bytes(b"ACGT\nACGT")
    with pytest.raises(IngestionError) as info:
        io.read_dataset(p, io.DNA_BYTES)
    assert info.value.offset == 4


def test_u32_dataset(tmp_path):
    p = tmp_path / "z.u32"
    p.write_bytes(bytes(16))
    assert list(io.read_dataset(p, io.U32_DLCP)) == [0, 0, 0, 0]
    vals = [0, 1, -1, 2**31 - 1, -(2**31)]
    p.write_bytes(io.write_symbols(vals, "int"))
    assert list(io.read_dataset(p, io.U32_DLCP)) == vals


def test_u32_dataset_length_not_multiple_of_four(tmp_path):
    p = tmp_path / "z.u32"
    p.write_bytes(bytes(10))
    with pytest.raises(IngestionError) as info:
        io.read_dataset(p, io.U32_DLCP)
    assert info.value.offset == 8


def test_missing_dataset(tmp_path):
    with pytest.raises(IngestionError):
        io.read_dataset(tmp_path / "nope", io.DNA_BYTES)
    p = tmp_path / "s"
    p.write_bytes(b"A")
    with pytest.raises(IngestionError):
        io.read_dataset(p, "fasta")
