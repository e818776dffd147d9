"""The three predecessor schemes: classic RLZ, GDC-style mismatch-terminated
phrases, and GDC phrases with run-length compressed relative pointers.

All positions are 0-based. The access formulas are the usual 1-based ones
shifted by one; ``B.rank(j + 1)`` below is the 1-based ``B.rank(j)``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from rlzap.errors import CorruptArchiveError, InvalidInputError, RangeError
from rlzap.literal_store import DnaLiteralStore, FixedLiteralStore, LiteralStore
from rlzap.matcher import Matcher, Symbols, as_int_array
from rlzap.reference import DNA, Reference, check_reference, guess_alphabet, join
from rlzap.succinct import DenseBitvector, PackedArray, SparseBitvector, bits_needed, unzigzag, zigzag


class _Baseline:
    scheme = ""
    target_len: int
    ref_len: int
    ref_checksum: int
    alphabet: str

    def bind(self, reference: Reference | Symbols) -> Reference:
        ref = Reference.wrap(reference, self.alphabet)
        check_reference(ref, self.ref_checksum, self.ref_len)
        return ref

    def _check_pos(self, j: int) -> None:
        if not 0 <= j < self.target_len:
            raise RangeError(f"position {j} outside 0..{self.target_len - 1}")

    def _check_range(self, i: int, length: int) -> None:
        if i < 0 or length < 0 or i + length > self.target_len:
            raise RangeError(f"range [{i}, {i + length}) outside 0..{self.target_len}")

    def components(self) -> dict[str, int]:
        raise NotImplementedError

    def size_bits(self) -> int:
        return sum(self.components().values())

    def decode(self, reference: Reference | Symbols):
        return self.extract(reference, 0, self.target_len)

    def stats(self) -> dict:
        comps = self.components()
        total = sum(comps.values())
        return {
            "scheme": self.scheme,
            "target_len": self.target_len,
            "phrases": self.phrase_count,
            "payload_bits": total,
            "bits_per_symbol": total / self.target_len if self.target_len else 0.0,
            "components": comps,
        }


def _mismatch_store(symbols: list[int], alphabet: str, chunk_len: int = 32) -> LiteralStore:
    if alphabet == DNA:
        return DnaLiteralStore.build(bytes(symbols), chunk_len)
    return FixedLiteralStore.build(symbols)


def _source_width(ref_len: int) -> int:
    return bits_needed(max(ref_len - 1, 0))


# ---------------------------------------------------------------------------
# Classic RLZ
# ---------------------------------------------------------------------------


class RlzClassic(_Baseline):
    """``Q``: source start of every phrase; ``B``: 1 at every phrase start."""

    scheme = "rlz"

    def __init__(self, *, target_len, ref_len, ref_checksum, alphabet, Q: PackedArray, B: SparseBitvector):
        if B.universe != target_len or Q.count != B.ones:
            raise CorruptArchiveError("RLZ sections disagree")
        self.target_len = target_len
        self.ref_len = ref_len
        self.ref_checksum = ref_checksum
        self.alphabet = alphabet
        self.Q = Q
        self.B = B

    @property
    def phrase_count(self) -> int:
        return self.B.ones

    def access(self, reference: Reference | Symbols, j: int):
        ref = self.bind(reference)
        self._check_pos(j)
        r = self.B.rank(j + 1)
        return ref.data[self.Q[r - 1] + j - self.B.select(r)]

    def extract(self, reference: Reference | Symbols, i: int, length: int):
        ref = self.bind(reference)
        self._check_range(i, length)
        end = i + length
        if not length:
            return join([], self.alphabet)
        B, Q, data = self.B, self.Q, ref.data
        t = B.ones
        p = B.rank(i + 1) - 1
        start = B.select(p + 1)
        parts = []
        pos = i
        while pos < end:
            nxt = B.select(p + 2) if p + 1 < t else self.target_len
            e = nxt if nxt < end else end
            q = Q[p] + pos - start
            parts.append(data[q : q + e - pos])
            pos = e
            start = nxt
            p += 1
        return join(parts, self.alphabet)

    def phrases(self) -> list[tuple[int, int, int]]:
        """(start, length, source) for every phrase."""
        t = self.B.ones
        starts = [self.B.select(k) for k in range(1, t + 1)] + [self.target_len]
        return [(starts[k], starts[k + 1] - starts[k], self.Q[k]) for k in range(t)]

    def components(self) -> dict[str, int]:
        return {"pointers": self.Q.size_bits(), "bitvectors": self.B.size_bits()}


def rlz_parse(target: Symbols, reference: Symbols, matcher: Optional[Matcher] = None, alphabet: str | None = None) -> RlzClassic:
    """Greedy leftmost-longest parse; every phrase is an exact reference copy."""
    alphabet = alphabet or guess_alphabet(target)
    ref = Reference.wrap(reference, alphabet)
    ms = matcher or Matcher(target, ref.data)
    n = ms.n
    starts: list[int] = []
    sources: list[int] = []
    i = 0
    while i < n:
        length, ptr = ms(i)
        if length == 0:
            sym = as_int_array(target)[i]
            raise InvalidInputError(f"symbol {int(sym)} at position {i} does not occur in the reference")
        starts.append(i)
        sources.append(i + ptr)
        i += length
        ms.forget_before(i)
    return RlzClassic(
        target_len=n,
        ref_len=len(ref),
        ref_checksum=ref.checksum,
        alphabet=ref.alphabet,
        Q=PackedArray.from_values(sources, _source_width(len(ref))) if sources else PackedArray(_source_width(len(ref)), 0),
        B=SparseBitvector.from_positions(starts, n),
    )


def rlz_access(x: RlzClassic, reference: Reference | Symbols, j: int):
    return x.access(reference, j)


# ---------------------------------------------------------------------------
# GDC
# ---------------------------------------------------------------------------


class GdcParse(_Baseline):
    """``Q``: source starts; ``M``: the closing mismatch symbol of every
    phrase; ``B``: 1 at the last position of every phrase."""

    scheme = "gdc"

    def __init__(self, *, target_len, ref_len, ref_checksum, alphabet, Q: PackedArray, M: LiteralStore, B: SparseBitvector):
        if B.universe != target_len or Q.count != B.ones or len(M) != B.ones:
            raise CorruptArchiveError("GDC sections disagree")
        self.target_len = target_len
        self.ref_len = ref_len
        self.ref_checksum = ref_checksum
        self.alphabet = alphabet
        self.Q = Q
        self.M = M
        self.B = B

    @property
    def phrase_count(self) -> int:
        return self.B.ones

    def access(self, reference: Reference | Symbols, j: int):
        ref = self.bind(reference)
        self._check_pos(j)
        B = self.B
        r = B.rank(j + 1)
        if r and B.select(r) == j:
            return self.M[r - 1]
        prev_end = B.select(r) if r else -1
        return ref.data[self.Q[r] + j - prev_end - 1]

    def extract(self, reference: Reference | Symbols, i: int, length: int):
        ref = self.bind(reference)
        self._check_range(i, length)
        if not length:
            return join([], self.alphabet)
        B, Q, M, data = self.B, self.Q, self.M, ref.data
        end = i + length
        p = B.rank(i)  # phrase holding i
        start = B.select(p) + 1 if p else 0
        parts = []
        pos = i
        while pos < end:
            last = B.select(p + 1)
            if pos < last:
                e = last if last < end else end
                q = Q[p] + pos - start
                parts.append(data[q : q + e - pos])
                pos = e
            if pos == last and pos < end:
                parts.append(M.run(p, 1))
                pos += 1
            start = last + 1
            p += 1
        return join(parts, self.alphabet)

    def phrases(self) -> list[tuple[int, int, int]]:
        """(start, length including the mismatch symbol, source)."""
        out = []
        start = 0
        for k in range(self.B.ones):
            last = self.B.select(k + 1)
            out.append((start, last - start + 1, self.Q[k]))
            start = last + 1
        return out

    def components(self) -> dict[str, int]:
        return {"pointers": self.Q.size_bits(), "mismatches": self.M.size_bits(), "bitvectors": self.B.size_bits()}


def _gdc_phrases(target: Symbols, ms: Matcher) -> tuple[list[int], list[int], list[int]]:
    """(last positions, sources, mismatch symbols); zero-length matches get source -1."""
    t = as_int_array(target).tolist()
    n = ms.n
    ends: list[int] = []
    sources: list[int] = []
    mism: list[int] = []
    i = 0
    while i < n:
        length, ptr = ms(i)
        length = min(length, n - i - 1)  # the final phrase still ends on a stored symbol
        ends.append(i + length)
        sources.append(i + ptr if length else -1)
        mism.append(t[i + length])
        i += length + 1
        ms.forget_before(i)
    return ends, sources, mism


def gdc_parse(target: Symbols, reference: Symbols, matcher: Optional[Matcher] = None, alphabet: str | None = None,
              chunk_len: int = 32) -> GdcParse:
    """Greedy parse into longest reference matches each closed by one stored symbol."""
    alphabet = alphabet or guess_alphabet(target)
    ref = Reference.wrap(reference, alphabet)
    ms = matcher or Matcher(target, ref.data)
    ends, sources, mism = _gdc_phrases(target, ms)
    width = _source_width(len(ref))
    return GdcParse(
        target_len=ms.n,
        ref_len=len(ref),
        ref_checksum=ref.checksum,
        alphabet=ref.alphabet,
        Q=PackedArray.from_values([max(s, 0) for s in sources], width) if sources else PackedArray(width, 0),
        M=_mismatch_store(mism, ref.alphabet, chunk_len),
        B=SparseBitvector.from_positions(ends, ms.n),
    )


def gdc_access(x: GdcParse, reference: Reference | Symbols, j: int):
    return x.access(reference, j)


# ---------------------------------------------------------------------------
# Relative pointers
# ---------------------------------------------------------------------------


class RelPtrParse(_Baseline):
    """GDC phrases with relative pointers ``D[k] = q_k - p_k`` stored as runs:
    ``V`` holds one zig-zag value per maximal run, ``L`` marks run starts."""

    scheme = "relptr"

    def __init__(self, *, target_len, ref_len, ref_checksum, alphabet, M: LiteralStore, B: SparseBitvector,
                 V: PackedArray, L: DenseBitvector):
        if B.universe != target_len or len(M) != B.ones or L.length != B.ones or V.count != L.ones:
            raise CorruptArchiveError("relative-pointer sections disagree")
        self.target_len = target_len
        self.ref_len = ref_len
        self.ref_checksum = ref_checksum
        self.alphabet = alphabet
        self.M = M
        self.B = B
        self.V = V
        self.L = L

    @property
    def phrase_count(self) -> int:
        return self.B.ones

    def D(self, k: int) -> int:
        """Relative pointer of phrase ``k`` (0-based)."""
        return unzigzag(self.V[self.L.rank(k + 1) - 1])

    def access(self, reference: Reference | Symbols, j: int):
        ref = self.bind(reference)
        self._check_pos(j)
        B = self.B
        r = B.rank(j + 1)
        if r and B.select(r) == j:
            return self.M[r - 1]
        return ref.data[self.D(r) + j]

    def extract(self, reference: Reference | Symbols, i: int, length: int):
        ref = self.bind(reference)
        self._check_range(i, length)
        if not length:
            return join([], self.alphabet)
        B, M, data = self.B, self.M, ref.data
        end = i + length
        p = B.rank(i)
        parts = []
        pos = i
        while pos < end:
            last = B.select(p + 1)
            if pos < last:
                e = last if last < end else end
                d = self.D(p)
                parts.append(data[pos + d : e + d])
                pos = e
            if pos == last and pos < end:
                parts.append(M.run(p, 1))
                pos += 1
            p += 1
        return join(parts, self.alphabet)

    def components(self) -> dict[str, int]:
        return {
            "pointers": self.V.size_bits(),
            "mismatches": self.M.size_bits(),
            "bitvectors": self.B.size_bits() + self.L.size_bits(),
        }


def relptr_build(g: GdcParse) -> RelPtrParse:
    """Replace GDC's explicit sources by run-length compressed relative pointers.

    A phrase with an empty copy part has no source; it inherits the previous
    pointer so that it never opens a run.
    """
    d: list[int] = []
    start = 0
    prev = 0
    for k in range(g.B.ones):
        last = g.B.select(k + 1)
        if last > start:
            prev = g.Q[k] - start
        d.append(prev)
        start = last + 1
    return relptr_from_pointers(g, d)


def relptr_from_pointers(g: GdcParse, d: list[int]) -> RelPtrParse:
    run_starts = [k for k in range(len(d)) if k == 0 or d[k] != d[k - 1]]
    values = [zigzag(d[k]) for k in run_starts]
    return RelPtrParse(
        target_len=g.target_len,
        ref_len=g.ref_len,
        ref_checksum=g.ref_checksum,
        alphabet=g.alphabet,
        M=g.M,
        B=g.B,
        V=PackedArray.from_values(values) if values else PackedArray(1, 0),
        L=DenseBitvector.from_positions(run_starts, len(d)),
    )


def relptr_access(x: RelPtrParse, reference: Reference | Symbols, j: int):
    return x.access(reference, j)


def baseline_size_bits(x: _Baseline) -> dict[str, int]:
    """Payload bits per component plus their ``total``."""
    comps = dict(x.components())
    comps["total"] = sum(comps.values())
    return comps
