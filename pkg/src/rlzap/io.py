"""Archive container format and dataset ingestion.

Container layout (all integers little-endian)::

    magic        5 bytes  b"RLZAP"
    version      u8       1
    scheme       u8       0 rlzap, 1 rlz, 2 gdc, 3 relptr
    alphabet     u8       0 dna, 1 int
    total_len    u64      size of the whole file in bytes
    target_len   u64
    ref_len      u64
    ref_checksum u64      BLAKE2b-64 of the reference
    params_len   u16      followed by params_len bytes of parameters
    n_sections   u16      followed by n_sections x (id u16, offset u64, length u64)
    sections              back to back, in table order
    crc32        u32      over every preceding byte

See FORMAT.md for the section payloads.
"""

from __future__ import annotations

import zlib
from pathlib import Path
from typing import Union

import numpy as np

from rlzap.archive import RlzapArchive
from rlzap.baselines import GdcParse, RelPtrParse, RlzClassic
from rlzap.errors import (
    BadMagicError,
    CorruptArchiveError,
    FormatError,
    IngestionError,
    TruncatedError,
    UnsupportedVersionError,
)
from rlzap.literal_store import read_store, write_store
from rlzap.parser import ParseParams
from rlzap.reference import DNA, INT, reference_checksum  # noqa: F401  (re-export)
from rlzap.succinct import DenseBitvector, LiteralCounter, PackedArray, SparseBitvector
from rlzap.wire import Reader, Writer

MAGIC = b"RLZAP"
VERSION = 1
SCHEMES = {"rlzap": 0, "rlz": 1, "gdc": 2, "relptr": 3}
SCHEME_NAMES = {v: k for k, v in SCHEMES.items()}
ALPHABET_TAGS = {DNA: 0, INT: 1}
ALPHABET_NAMES = {v: k for k, v in ALPHABET_TAGS.items()}

SECTION_NAMES = {
    "rlzap": {1: "phrase_bv", 2: "explicit_bv", 3: "explicit_ptrs", 4: "adaptive_ptrs", 5: "literal_counts", 6: "literals"},
    "rlz": {1: "B", 2: "Q"},
    "gdc": {1: "B", 2: "Q", 3: "M"},
    "relptr": {1: "B", 3: "M", 4: "V", 5: "L"},
}

Archive = Union[RlzapArchive, RlzClassic, GdcParse, RelPtrParse]

_FIXED_HEADER = 5 + 3 + 8 * 4


def _params_bytes(p: ParseParams) -> bytes:
    w = Writer()
    w.u8(p.delta_bits)
    w.u32(p.look_ahead)
    w.u32(p.min_explicit_length)
    w.u8(p.max_lit)
    w.u32(p.sample_interval)
    w.u8(p.chunk_len)
    w.u8(p.sigma_bits)
    # adaptive pointer width implied by LookAhead alone, kept for reference
    w.u8(_lookahead_width(p.look_ahead))
    return w.getvalue()


def _lookahead_width(look_ahead: int) -> int:
    return (look_ahead - 1).bit_length() + 1


def _read_params(raw: bytes) -> ParseParams:
    r = Reader(raw)
    try:
        p = ParseParams(
            delta_bits=r.u8(),
            look_ahead=r.u32(),
            min_explicit_length=r.u32(),
            max_lit=r.u8(),
            sample_interval=r.u32(),
            chunk_len=r.u8(),
            sigma_bits=r.u8(),
        )
        width = r.u8()
    except (ValueError, TruncatedError) as e:
        raise CorruptArchiveError(f"bad parameter block: {e}") from None
    if not r.at_end():
        raise CorruptArchiveError("trailing bytes in parameter block")
    if width != _lookahead_width(p.look_ahead):
        raise CorruptArchiveError(f"LookAhead width {width} does not match LookAhead {p.look_ahead}")
    return p


def _sections(a: Archive) -> list[tuple[int, Writer]]:
    def sec(write) -> Writer:
        w = Writer()
        write(w)
        return w

    if isinstance(a, RlzapArchive):
        return [
            (1, sec(a.phrase_bv.write)),
            (2, sec(a.explicit_bv.write)),
            (3, sec(a.explicit_ptrs.write)),
            (4, sec(a.adaptive_ptrs.write)),
            (5, sec(a.counts.write)),
            (6, sec(lambda w: write_store(a.literals, w))),
        ]
    if isinstance(a, RlzClassic):
        return [(1, sec(a.B.write)), (2, sec(a.Q.write))]
    if isinstance(a, GdcParse):
        return [(1, sec(a.B.write)), (2, sec(a.Q.write)), (3, sec(lambda w: write_store(a.M, w)))]
    if isinstance(a, RelPtrParse):
        return [
            (1, sec(a.B.write)),
            (3, sec(lambda w: write_store(a.M, w))),
            (4, sec(a.V.write)),
            (5, sec(a.L.write)),
        ]
    raise TypeError(f"cannot serialize {type(a).__name__}")


def serialize(a: Archive) -> bytes:
    params = _params_bytes(a.params) if isinstance(a, RlzapArchive) else b""
    sections = [(sid, w.getvalue()) for sid, w in _sections(a)]
    header_len = _FIXED_HEADER + 2 + len(params) + 2 + 18 * len(sections)
    total = header_len + sum(len(b) for _, b in sections) + 4
    w = Writer()
    w.raw(MAGIC)
    w.u8(VERSION)
    w.u8(SCHEMES[a.scheme])
    w.u8(ALPHABET_TAGS[a.alphabet])
    w.u64(total)
    w.u64(a.target_len)
    w.u64(a.ref_len)
    w.u64(a.ref_checksum)
    w.u16(len(params))
    w.raw(params)
    w.u16(len(sections))
    off = header_len
    for sid, body in sections:
        w.u16(sid)
        w.u64(off)
        w.u64(len(body))
        off += len(body)
    for _, body in sections:
        w.raw(body)
    w.u32(zlib.crc32(w.buf))
    out = w.getvalue()
    assert len(out) == total
    return out


class Header:
    """Decoded container header and section table."""

    def __init__(self, scheme, alphabet, total_len, target_len, ref_len, ref_checksum, params, sections, header_len):
        self.scheme = scheme
        self.alphabet = alphabet
        self.total_len = total_len
        self.target_len = target_len
        self.ref_len = ref_len
        self.ref_checksum = ref_checksum
        self.params = params
        self.sections = sections  # id -> (offset, length)
        self.header_len = header_len

    def section_sizes(self) -> dict[str, int]:
        names = SECTION_NAMES[self.scheme]
        return {names[sid]: length for sid, (_, length) in self.sections.items()}


def read_header(data: bytes) -> Header:
    if len(data) < len(MAGIC):
        if MAGIC.startswith(bytes(data)):
            raise TruncatedError(f"file is {len(data)} bytes, shorter than the magic")
        raise BadMagicError("not an RLZAP archive")
    if bytes(data[:5]) != MAGIC:
        raise BadMagicError("not an RLZAP archive")
    r = Reader(data, 5)
    version = r.u8()
    if version != VERSION:
        raise UnsupportedVersionError(f"format version {version} is not supported (expected {VERSION})")
    scheme_tag = r.u8()
    alpha_tag = r.u8()
    total = r.u64()
    if len(data) < total:
        raise TruncatedError(f"archive declares {total} bytes, file has {len(data)}")
    if len(data) > total:
        raise CorruptArchiveError(f"{len(data) - total} trailing bytes after the archive")
    if total < _FIXED_HEADER + 8:
        raise CorruptArchiveError("declared length is shorter than the header")
    stored_crc = int.from_bytes(bytes(data[total - 4 : total]), "little")
    if zlib.crc32(memoryview(data)[: total - 4]) != stored_crc:
        raise CorruptArchiveError("CRC-32 mismatch: archive is corrupted")
    if scheme_tag not in SCHEME_NAMES:
        raise CorruptArchiveError(f"unknown scheme tag {scheme_tag}")
    if alpha_tag not in ALPHABET_NAMES:
        raise CorruptArchiveError(f"unknown alphabet tag {alpha_tag}")
    scheme = SCHEME_NAMES[scheme_tag]
    r.end = total - 4
    target_len = r.u64()
    ref_len = r.u64()
    checksum = r.u64()
    params_raw = r.take(r.u16())
    params = _read_params(params_raw) if scheme == "rlzap" else None
    if scheme != "rlzap" and params_raw:
        raise CorruptArchiveError("baseline archives carry no parameter block")
    nsec = r.u16()
    sections: dict[int, tuple[int, int]] = {}
    for _ in range(nsec):
        sid, off, length = r.u16(), r.u64(), r.u64()
        if sid in sections:
            raise CorruptArchiveError(f"duplicate section {sid}")
        sections[sid] = (off, length)
    header_len = r.pos
    expected = header_len
    for sid, (off, length) in sections.items():
        if off != expected:
            raise CorruptArchiveError(f"section {sid} at {off}, expected {expected}")
        expected += length
    if expected != total - 4:
        raise CorruptArchiveError("section table does not cover the payload")
    if set(sections) != set(SECTION_NAMES[scheme]):
        raise CorruptArchiveError(f"unexpected section set for {scheme}")
    return Header(scheme, ALPHABET_NAMES[alpha_tag], total, target_len, ref_len, checksum, params, sections, header_len)


def deserialize(data: bytes) -> Archive:
    try:
        return _deserialize(data)
    except FormatError:
        raise
    except (ValueError, IndexError, OverflowError) as e:
        raise CorruptArchiveError(f"inconsistent archive contents: {e}") from None


def _deserialize(data: bytes) -> Archive:
    h = read_header(data)

    def section(sid: int) -> Reader:
        off, length = h.sections[sid]
        return Reader(data, off, off + length)

    def done(r: Reader, obj):
        if not r.at_end():
            raise CorruptArchiveError("section has trailing bytes")
        return obj

    def load(sid: int, reader_fn):
        r = section(sid)
        return done(r, reader_fn(r))

    common = dict(target_len=h.target_len, ref_len=h.ref_len, ref_checksum=h.ref_checksum, alphabet=h.alphabet)
    if h.scheme == "rlzap":
        return RlzapArchive(
            params=h.params,
            phrase_bv=load(1, SparseBitvector.read),
            explicit_bv=load(2, DenseBitvector.read),
            explicit_ptrs=load(3, PackedArray.read),
            adaptive_ptrs=load(4, PackedArray.read),
            counts=load(5, LiteralCounter.read),
            literals=load(6, read_store),
            **common,
        )
    if h.scheme == "rlz":
        return RlzClassic(B=load(1, SparseBitvector.read), Q=load(2, PackedArray.read), **common)
    if h.scheme == "gdc":
        return GdcParse(B=load(1, SparseBitvector.read), Q=load(2, PackedArray.read), M=load(3, read_store), **common)
    return RelPtrParse(
        B=load(1, SparseBitvector.read),
        M=load(3, read_store),
        V=load(4, PackedArray.read),
        L=load(5, DenseBitvector.read),
        **common,
    )


def save(a: Archive, path: str | Path) -> int:
    data = serialize(a)
    Path(path).write_bytes(data)
    return len(data)


def load(path: str | Path) -> Archive:
    return deserialize(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------

DNA_BYTES = "dna-bytes"
U32_DLCP = "u32-dlcp"

_NORMALIZE = np.zeros(256, dtype=np.uint8)
for _c in b"ACGTN":
    _NORMALIZE[_c] = _c
    _NORMALIZE[ord(chr(_c).lower())] = _c


def parse_dna(raw: bytes) -> bytes:
    """Upper-case ``raw`` and check it only holds A, C, G, T and N."""
    arr = np.frombuffer(raw, dtype=np.uint8)
    out = _NORMALIZE[arr]
    bad = np.flatnonzero(out == 0)
    if len(bad):
        k = int(bad[0])
        raise IngestionError(f"byte {raw[k]:#04x} is not a DNA symbol", offset=k)
    return out.tobytes()


def parse_u32(raw: bytes) -> np.ndarray:
    """Little-endian 32-bit entries, read as signed values."""
    if len(raw) % 4:
        raise IngestionError(f"length {len(raw)} is not a multiple of 4", offset=len(raw) - len(raw) % 4)
    return np.frombuffer(raw, dtype="<i4").astype(np.int64)


def read_dataset(path: str | Path, kind: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise IngestionError(f"cannot read {path}: {e.strerror}") from None
    if kind == DNA_BYTES:
        return parse_dna(raw)
    if kind == U32_DLCP:
        return parse_u32(raw)
    raise IngestionError(f"unknown dataset kind {kind!r}")


def write_symbols(seq, alphabet: str) -> bytes:
    """Inverse of ingestion: raw bytes for DNA, little-endian 32-bit entries otherwise."""
    if alphabet == DNA:
        return bytes(seq)
    return np.asarray(seq, dtype=np.int64).astype("<i4").tobytes()
