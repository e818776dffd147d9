"""Reference sequences bound for extraction, and their 64-bit checksum."""

from __future__ import annotations

import hashlib

import numpy as np

from rlzap.errors import InvalidInputError, ReferenceMismatchError
from rlzap.matcher import Symbols

DNA = "dna"
INT = "int"
ALPHABETS = (DNA, INT)


def canonical_bytes(seq: Symbols, alphabet: str) -> bytes:
    if alphabet == DNA:
        return bytes(seq)
    return np.asarray(seq, dtype="<i8").tobytes()


def reference_checksum(seq: Symbols, alphabet: str) -> int:
    """64-bit BLAKE2b digest of the canonical encoding of ``seq``."""
    h = hashlib.blake2b(canonical_bytes(seq, alphabet), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def guess_alphabet(seq: Symbols) -> str:
    return DNA if isinstance(seq, (bytes, bytearray)) else INT


class Reference:
    """A reference held in the form extraction wants: ``bytes`` for DNA,
    a list of ints otherwise."""

    __slots__ = ("alphabet", "data", "checksum")

    def __init__(self, seq: Symbols, alphabet: str | None = None):
        alphabet = alphabet or guess_alphabet(seq)
        if alphabet not in ALPHABETS:
            raise InvalidInputError(f"unknown alphabet {alphabet!r}")
        self.alphabet = alphabet
        self.data = bytes(seq) if alphabet == DNA else [int(v) for v in np.asarray(seq, dtype=np.int64)]
        self.checksum = reference_checksum(self.data, alphabet)

    def __len__(self) -> int:
        return len(self.data)

    @classmethod
    def wrap(cls, seq: "Reference | Symbols", alphabet: str | None = None) -> "Reference":
        return seq if isinstance(seq, Reference) else cls(seq, alphabet)


def check_reference(ref: Reference, checksum: int, length: int) -> None:
    """Raise unless ``ref`` is the reference an archive recorded."""
    if ref.checksum != checksum or len(ref) != length:
        raise ReferenceMismatchError(
            f"reference checksum {ref.checksum:016x} (length {len(ref)}) does not match the archive's "
            f"{checksum:016x} (length {length})"
        )


def join(parts: list, alphabet: str):
    if alphabet == DNA:
        return b"".join(parts)
    out: list[int] = []
    for part in parts:
        out.extend(part)
    return out
