"""Matching statistics of a target against a reference.

For target position ``i`` the longest match is the longest common prefix of
``S[i:]`` with any suffix ``R[k:]``; ties go to the smallest ``k``. Matches
are found by binary search over the suffix array of the reference.

Both sequences are first mapped onto a shared code alphabet and laid out as
big-endian byte strings (1, 2 or 4 bytes per symbol), so plain ``bytes``
comparison gives lexicographic symbol order and C-level slicing does the
heavy lifting.
"""

from __future__ import annotations

from array import array
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from rlzap.errors import InvalidInputError

Symbols = Union[bytes, bytearray, Sequence[int], np.ndarray]

# symbols compared in the first search round
_FIRST_CUT = 32


@dataclass
class MatchingStatistics:
    """``match_len[i]`` and ``rel_ptr[i]`` (source start minus ``i``)."""

    match_len: list[int]
    rel_ptr: list[int]

    def __len__(self) -> int:
        return len(self.match_len)


def as_int_array(seq: Symbols) -> np.ndarray:
    if isinstance(seq, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(seq), dtype=np.uint8).astype(np.int64)
    return np.asarray(seq, dtype=np.int64).reshape(-1)


def encode_pair(target: Symbols, reference: Symbols) -> tuple[bytes, bytes, int]:
    """Map both sequences onto dense codes; return (target, reference, width)."""
    t = as_int_array(target)
    r = as_int_array(reference)
    if isinstance(target, (bytes, bytearray)) and isinstance(reference, (bytes, bytearray)):
        return bytes(target), bytes(reference), 1
    alphabet = np.unique(np.concatenate([t, r]))
    if len(alphabet) <= 256:
        width, dtype = 1, ">u1"
    elif len(alphabet) <= 65536:
        width, dtype = 2, ">u2"
    else:
        width, dtype = 4, ">u4"
    tc = np.searchsorted(alphabet, t).astype(dtype).tobytes()
    rc = np.searchsorted(alphabet, r).astype(dtype).tobytes()
    return tc, rc, width


def suffix_array(codes: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling over integer codes."""
    n = len(codes)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(codes, return_inverse=True)
    rank = rank.astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        order = np.lexsort((second, rank))
        r1 = rank[order]
        r2 = second[order]
        change = np.empty(n, dtype=np.int64)
        change[0] = 0
        change[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new = np.cumsum(change)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = new
        if new[-1] == n - 1:
            return order.astype(np.int64)
        k *= 2


def _lcp_bytes(a: bytes, i: int, b: bytes, j: int, start: int) -> int:
    """Length of the common prefix of ``a[i:]`` and ``b[j:]``, known >= start."""
    l = start
    chunk = 32
    la = len(a) - i
    lb = len(b) - j
    limit = la if la < lb else lb
    while l < limit:
        c = chunk if l + chunk <= limit else limit - l
        x = a[i + l : i + l + c]
        y = b[j + l : j + l + c]
        if x == y:
            l += c
            if chunk < 4096:
                chunk <<= 1
            continue
        d = int.from_bytes(x, "big") ^ int.from_bytes(y, "big")
        return l + c - 1 - (d.bit_length() - 1) // 8
    return l


class ReferenceIndex:
    """Suffix-array index over a code-mapped reference."""

    def __init__(self, ref_codes: bytes, width: int = 1):
        if not ref_codes:
            raise InvalidInputError("reference must not be empty")
        self.ref = ref_codes
        self.width = width
        self.n = len(ref_codes) // width
        codes = np.frombuffer(ref_codes, dtype=">u%d" % width).astype(np.int64)
        sa = suffix_array(codes)
        self._sa_np = sa
        self.sa = array("q", sa.tobytes())

    def longest_match(self, text: bytes, i: int) -> tuple[int, int]:
        """(length, k) of the longest match of ``text[i:]`` (symbol units)."""
        w = self.width
        ref = self.ref
        sa = self.sa
        x = i * w
        if x >= len(text):
            return 0, 0
        # Binary search on suffixes cut to k bytes. Cutting keeps suffix
        # array order, so the insertion point is exact unless some cut
        # suffix equals the cut pattern; then narrow to those and cut longer.
        lo, hi = 0, self.n
        k = _FIRST_CUT * w
        while True:
            pat = text[x : x + k]

            def key(j: int, k: int = k) -> bytes:
                y = j * w
                return ref[y : y + k]

            a = bisect_left(sa, pat, lo, hi, key=key)
            if len(pat) < k or a == hi or key(sa[a]) != pat:
                break
            hi = bisect_right(sa, pat, a, hi, key=key)
            lo = a
            k *= 8
        # the longest match sits next to the insertion point
        best = 0
        best_idx = -1
        for j in (a - 1, a):
            if 0 <= j < self.n:
                l = _lcp_bytes(text, x, ref, sa[j] * w, 0)
                if l > best:
                    best, best_idx = l, j
        length = best // w
        if length == 0:
            return 0, 0
        return length, self._leftmost(text, x, length, best_idx) - i

    def _leftmost(self, text: bytes, x: int, length: int, idx: int) -> int:
        """Smallest reference position whose suffix shares ``length`` symbols."""
        w = self.width
        nbytes = length * w
        pat = text[x : x + nbytes]
        ref = self.ref
        sa = self.sa
        n = self.n

        def key(j: int) -> bytes:
            y = j * w
            return ref[y : y + nbytes]

        lo = idx
        hi = idx + 1
        if lo > 0 and key(sa[lo - 1]) == pat:
            lo = bisect_left(sa, pat, 0, lo - 1, key=key)
        if hi < n and key(sa[hi]) == pat:
            hi = bisect_right(sa, pat, hi + 1, n, key=key)
        if hi - lo == 1:
            return sa[lo]
        return int(self._sa_np[lo:hi].min())


class Matcher:
    """Lazily evaluated matching statistics for one (target, reference) pair."""

    def __init__(self, target: Symbols, reference: Symbols, index: ReferenceIndex | None = None):
        if len(reference) == 0:
            raise InvalidInputError("reference must not be empty")
        tc, rc, width = encode_pair(target, reference)
        if index is None or index.ref != rc or index.width != width:
            index = ReferenceIndex(rc, width)
        self.index = index
        self.text = tc
        self.n = len(tc) // width
        self._cache: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return self.n

    def __call__(self, i: int) -> tuple[int, int]:
        """(MatchLen(i), MatchRelPtr(i)); a zero length comes with pointer 0."""
        hit = self._cache.get(i)
        if hit is None:
            hit = self.index.longest_match(self.text, i)
            self._cache[i] = hit
        return hit

    def forget_before(self, i: int) -> None:
        if len(self._cache) > 4096:
            self._cache = {k: v for k, v in self._cache.items() if k >= i}


def matching_statistics(target: Symbols, reference: Symbols) -> MatchingStatistics:
    """Full matching statistics arrays for ``target`` against ``reference``."""
    m = Matcher(target, reference)
    lens: list[int] = []
    ptrs: list[int] = []
    for i in range(m.n):
        l, p = m(i)
        lens.append(l)
        ptrs.append(p)
    return MatchingStatistics(lens, ptrs)
