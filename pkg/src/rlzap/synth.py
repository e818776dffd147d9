"""Seeded synthetic references and mutated targets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DNA_ALPHABET = b"ACGT"


@dataclass(frozen=True)
class MutationRates:
    substitution: float = 1e-2
    insertion: float = 5e-4
    deletion: float = 5e-4
    multi_substitution: float = 0.0
    max_multi: int = 6

    @property
    def total(self) -> float:
        return self.substitution + self.insertion + self.deletion + self.multi_substitution


def random_dna(n: int, rng: np.random.Generator) -> bytes:
    return np.frombuffer(DNA_ALPHABET, dtype=np.uint8)[rng.integers(0, 4, n)].tobytes()


def random_ints(n: int, rng: np.random.Generator, spread: int = 40) -> list[int]:
    """Small signed values, roughly like a differentially coded LCP array."""
    return rng.integers(-spread, spread + 1, n).tolist()


def _other(sym: int, alphabet: np.ndarray, rng: np.random.Generator) -> int:
    while True:
        c = int(alphabet[rng.integers(0, len(alphabet))])
        if c != sym:
            return c


def mutate(seq, rates: MutationRates, rng: np.random.Generator, alphabet=None):
    """Plant substitutions, single-symbol insertions and deletions, and
    multi-symbol substitutions at the given per-position rates.

    Returns ``bytes`` for ``bytes`` input and a list of ints otherwise.
    """
    is_bytes = isinstance(seq, (bytes, bytearray))
    arr = np.frombuffer(bytes(seq), dtype=np.uint8) if is_bytes else np.asarray(seq, dtype=np.int64)
    if alphabet is None:
        alphabet = np.frombuffer(DNA_ALPHABET, dtype=np.uint8) if is_bytes else np.unique(arr)
    alphabet = np.asarray(alphabet)
    n = len(arr)
    u = rng.random(n)
    cuts = np.cumsum([rates.substitution, rates.insertion, rates.deletion, rates.multi_substitution])
    events = np.flatnonzero(u < cuts[-1])
    out: list = []
    pos = 0
    for e in events:
        e = int(e)
        if e < pos:
            continue
        out.append(arr[pos:e])
        kind = int(np.searchsorted(cuts, u[e], side="right"))
        if kind == 0:
            out.append(np.array([_other(int(arr[e]), alphabet, rng)], dtype=arr.dtype))
            pos = e + 1
        elif kind == 1:
            out.append(np.array([alphabet[rng.integers(0, len(alphabet))], arr[e]], dtype=arr.dtype))
            pos = e + 1
        elif kind == 2:
            pos = e + 1
        else:
            k = int(rng.integers(2, rates.max_multi + 1))
            block = arr[e : e + k]
            out.append(np.array([_other(int(s), alphabet, rng) for s in block], dtype=arr.dtype))
            pos = e + len(block)
    out.append(arr[pos:])
    res = np.concatenate(out) if out else arr[:0]
    return res.tobytes() if is_bytes else res.tolist()


def substitutions_only(seq: bytes, positions, rng: np.random.Generator) -> bytes:
    arr = bytearray(seq)
    alphabet = np.frombuffer(DNA_ALPHABET, dtype=np.uint8)
    for p in positions:
        arr[p] = _other(arr[p], alphabet, rng)
    return bytes(arr)


def genome_collection(ref_len: int, strains: int, rates: MutationRates, seed: int) -> tuple[bytes, bytes]:
    """A random reference and the concatenation of ``strains`` mutated copies."""
    rng = np.random.default_rng(seed)
    ref = random_dna(ref_len, rng)
    target = b"".join(mutate(ref, rates, rng) for _ in range(strains))
    return ref, target
