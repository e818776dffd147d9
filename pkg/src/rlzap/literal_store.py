"""Literal tables: 2-bit DNA with N exceptions, and fixed-width integers."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from rlzap.errors import CorruptArchiveError, InvalidInputError, RangeError
from rlzap.succinct import ChunkedExceptionBitvector, PackedArray, zigzag, unzigzag
from rlzap.wire import Reader, Writer

DNA_KIND = 0
FIXED_KIND = 1

_DNA_CODE = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(b"ACGT"):
    _DNA_CODE[_c] = _i
_DNA_CODE[ord("N")] = 0  # N is stored as A and flagged as an exception
_DNA_SYMBOLS = b"ACGT"
_N = ord("N")


class DnaLiteralStore:
    """2 bits per symbol over ACGT; positions holding N are flagged in a
    chunked exception bitvector."""

    kind = DNA_KIND

    def __init__(self, codes: PackedArray, exceptions: ChunkedExceptionBitvector):
        if codes.width != 2 or exceptions.length != codes.count:
            raise CorruptArchiveError("DNA literal store sections disagree")
        self.codes = codes
        self.exceptions = exceptions
        self._bytes = codes.words.tobytes()
        self._has_n = exceptions.chunks.ones > 0

    @classmethod
    def build(cls, symbols: bytes | Sequence[int], chunk_len: int = 32) -> "DnaLiteralStore":
        if not 8 <= chunk_len <= 64:
            raise InvalidInputError(f"chunk length must be in 8..64, got {chunk_len}")
        raw = np.frombuffer(bytes(symbols), dtype=np.uint8)
        codes = _DNA_CODE[raw]
        bad = np.flatnonzero(codes == 255)
        if len(bad):
            k = int(bad[0])
            raise InvalidInputError(f"literal {raw[k]!r} at index {k} is not one of A, C, G, T, N")
        packed = PackedArray.from_values(codes, 2) if len(codes) else PackedArray(2, 0)
        exc = ChunkedExceptionBitvector.from_positions(np.flatnonzero(raw == _N), len(raw), chunk_len)
        return cls(packed, exc)

    def __len__(self) -> int:
        return self.codes.count

    def get(self, k: int) -> int:
        if not 0 <= k < self.codes.count:
            raise RangeError(f"literal {k} outside 0..{self.codes.count - 1}")
        if self._has_n and self.exceptions.get(k):
            return _N
        return _DNA_SYMBOLS[(self._bytes[k >> 2] >> ((k & 3) << 1)) & 3]

    __getitem__ = get

    def run(self, k: int, count: int) -> bytes:
        """``count`` consecutive literals starting at ``k``."""
        return bytes(self.get(j) for j in range(k, k + count))

    def size_bits(self) -> int:
        return self.codes.size_bits() + self.exceptions.size_bits()

    def write(self, w: Writer) -> None:
        self.codes.write(w)
        self.exceptions.write(w)

    @classmethod
    def read(cls, r: Reader) -> "DnaLiteralStore":
        return cls(PackedArray.read(r), ChunkedExceptionBitvector.read(r))


class FixedLiteralStore:
    """Signed integers, zig-zag coded at one global minimal width."""

    kind = FIXED_KIND

    def __init__(self, values: PackedArray):
        self.values = values

    @classmethod
    def build(cls, values: Sequence[int]) -> "FixedLiteralStore":
        zz = [zigzag(int(v)) for v in values]
        if any(z >> 64 for z in zz):
            raise InvalidInputError("literal value does not fit in 64 bits")
        return cls(PackedArray.from_values(zz) if zz else PackedArray(1, 0))

    @property
    def width(self) -> int:
        return self.values.width

    def __len__(self) -> int:
        return self.values.count

    def get(self, k: int) -> int:
        return unzigzag(self.values[k])

    __getitem__ = get

    def run(self, k: int, count: int) -> list[int]:
        return [unzigzag(self.values[j]) for j in range(k, k + count)]

    def size_bits(self) -> int:
        return self.values.size_bits()

    def write(self, w: Writer) -> None:
        self.values.write(w)

    @classmethod
    def read(cls, r: Reader) -> "FixedLiteralStore":
        return cls(PackedArray.read(r))


LiteralStore = DnaLiteralStore | FixedLiteralStore


def dna_build(symbols: bytes, chunk_len: int = 32) -> DnaLiteralStore:
    return DnaLiteralStore.build(symbols, chunk_len)


def fixed_build(values: Sequence[int]) -> FixedLiteralStore:
    return FixedLiteralStore.build(values)


def write_store(store: LiteralStore, w: Writer) -> None:
    w.u8(store.kind)
    store.write(w)


def read_store(r: Reader) -> LiteralStore:
    kind = r.u8()
    if kind == DNA_KIND:
        return DnaLiteralStore.read(r)
    if kind == FIXED_KIND:
        return FixedLiteralStore.read(r)
    raise CorruptArchiveError(f"unknown literal store kind {kind}")
