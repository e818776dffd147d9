"""Succinct RLZAP encoding of a parsing, with random access.

Layout:

* ``phrase_bv``  sparse bitvector over the target, 1 at every phrase start;
* ``explicit_bv`` dense bitvector over phrases, 1 for explicit phrases;
* ``explicit_ptrs`` zig-zag offsets of explicit phrases,
  ``ceil(log2(|R| + |S|)) + 1`` bits each;
* ``adaptive_ptrs`` zig-zag deltas of adaptive phrases, DeltaBits each;
* ``counts`` per-phrase trailing literal counts with sampled prefix sums;
* ``literals`` every literal symbol in parse order.

The offset of phrase ``p`` is ``explicit_ptrs[e - 1]`` when it is explicit and
``explicit_ptrs[e - 1] + adaptive_ptrs[p - e]`` otherwise, where ``e`` is the
number of explicit phrases among the first ``p + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from rlzap.errors import CorruptArchiveError, EncodingError, RangeError
from rlzap.literal_store import DnaLiteralStore, FixedLiteralStore, LiteralStore
from rlzap.matcher import Symbols
from rlzap.parser import ParseParams, Parsing, Phrase, fits_delta, parse
from rlzap.reference import DNA, Reference, check_reference, guess_alphabet, join
from rlzap.succinct import DenseBitvector, LiteralCounter, PackedArray, SparseBitvector, unzigzag, zigzag


def explicit_width(ref_len: int, target_len: int) -> int:
    return max(1, (ref_len + target_len - 1).bit_length()) + 1


@dataclass(frozen=True)
class PhraseView:
    index: int
    start: int
    length: int
    lit_len: int
    explicit: bool
    rel: int


class QueryProbe:
    """Counts structure queries issued during one call."""

    def __init__(self) -> None:
        self.phrase_rank = 0
        self.phrase_select = 0
        self.explicit_rank = 0

    def wrap(self, fn: Callable[[int], int], name: str) -> Callable[[int], int]:
        def counted(x: int) -> int:
            setattr(self, name, getattr(self, name) + 1)
            return fn(x)

        return counted


class RlzapArchive:
    scheme = "rlzap"

    def __init__(
        self,
        *,
        target_len: int,
        ref_len: int,
        ref_checksum: int,
        alphabet: str,
        params: ParseParams,
        phrase_bv: SparseBitvector,
        explicit_bv: DenseBitvector,
        explicit_ptrs: PackedArray,
        adaptive_ptrs: PackedArray,
        counts: LiteralCounter,
        literals: LiteralStore,
    ):
        self.target_len = target_len
        self.ref_len = ref_len
        self.ref_checksum = ref_checksum
        self.alphabet = alphabet
        self.params = params
        self.phrase_bv = phrase_bv
        self.explicit_bv = explicit_bv
        self.explicit_ptrs = explicit_ptrs
        self.adaptive_ptrs = adaptive_ptrs
        self.counts = counts
        self.literals = literals
        self._bound: Reference | None = None
        # (words, width, mask) for inlined pointer reads in _rel
        self._ep = (explicit_ptrs.words, explicit_ptrs.width, (1 << explicit_ptrs.width) - 1)
        self._ap = (adaptive_ptrs.words, adaptive_ptrs.width, (1 << adaptive_ptrs.width) - 1)
        self._cnt = (counts._bytes, counts._per, counts.max_lit, counts._mask)
        self.check()

    # -- construction -----------------------------------------------------

    @classmethod
    def encode(cls, p: Parsing, reference: Reference | Symbols, alphabet: str | None = None) -> "RlzapArchive":
        ref = Reference.wrap(reference, alphabet)
        params = p.params
        phrases = p.phrases
        if phrases and not phrases[0].explicit:
            raise EncodingError("first phrase must be explicit")
        cap = params.max_literals
        starts = []
        flags = []
        a_vals = []
        r_vals = []
        lits = []
        base = 0
        for ph in phrases:
            if ph.lit_len > cap:
                raise EncodingError(f"phrase at {ph.start} carries {ph.lit_len} literals, cap is {cap}")
            starts.append(ph.start)
            flags.append(1 if ph.explicit else 0)
            lits.append(ph.lit_len)
            if ph.explicit:
                base = ph.rel
                a_vals.append(zigzag(ph.rel))
            else:
                delta = ph.rel - base
                if not fits_delta(delta, params.delta_bits):
                    raise EncodingError(f"delta {delta} at {ph.start} exceeds {params.delta_bits} bits")
                r_vals.append(zigzag(delta))
        if sum(lits) != len(p.literals):
            raise EncodingError("literal payload does not match the parsing")
        width = explicit_width(len(ref), p.target_len)
        if a_vals and max(a_vals) >> width:
            raise EncodingError("explicit offset out of range")
        literals: LiteralStore
        if ref.alphabet == DNA:
            literals = DnaLiteralStore.build(bytes(p.literals), params.chunk_len)
        else:
            literals = FixedLiteralStore.build(p.literals)
        return cls(
            target_len=p.target_len,
            ref_len=len(ref),
            ref_checksum=ref.checksum,
            alphabet=ref.alphabet,
            params=params,
            phrase_bv=SparseBitvector.from_positions(starts, p.target_len),
            explicit_bv=DenseBitvector.from_bits(np.asarray(flags, dtype=np.uint8)),
            explicit_ptrs=PackedArray.from_values(a_vals, width) if a_vals else PackedArray(width, 0),
            adaptive_ptrs=PackedArray.from_values(r_vals, params.delta_bits)
            if r_vals
            else PackedArray(params.delta_bits, 0),
            counts=LiteralCounter.build(lits, params.max_lit, params.sample_interval),
            literals=literals,
        )

    @classmethod
    def compress(
        cls, target: Symbols, reference: Reference | Symbols, params: ParseParams | None = None, alphabet: str | None = None
    ) -> "RlzapArchive":
        """Parse ``target`` against ``reference`` and encode the result."""
        ref = Reference.wrap(reference, alphabet or guess_alphabet(target))
        p = parse(target, ref.data, params)
        return cls.encode(p, ref)

    def check(self) -> None:
        m = self.phrase_bv.ones
        if self.phrase_bv.universe != self.target_len:
            raise CorruptArchiveError("phrase bitvector length differs from target length")
        if self.explicit_bv.length != m or len(self.counts) != m:
            raise CorruptArchiveError("per-phrase structures disagree on the phrase count")
        if self.explicit_bv.ones != self.explicit_ptrs.count:
            raise CorruptArchiveError("explicit pointer table size mismatch")
        if m - self.explicit_bv.ones != self.adaptive_ptrs.count:
            raise CorruptArchiveError("adaptive pointer table size mismatch")
        if self.counts.total != len(self.literals):
            raise CorruptArchiveError("literal count total differs from literal store size")
        if m and (self.explicit_bv[0] != 1 or self.phrase_bv.select(1) != 0):
            raise CorruptArchiveError("first phrase must start at 0 and be explicit")
        if self.adaptive_ptrs.width != self.params.delta_bits:
            raise CorruptArchiveError("adaptive pointer width differs from DeltaBits")
        if self.explicit_ptrs.width != explicit_width(self.ref_len, self.target_len):
            raise CorruptArchiveError("explicit pointer width mismatch")
        if self.counts.max_lit != self.params.max_lit or self.counts.sample_interval != self.params.sample_interval:
            raise CorruptArchiveError("literal counter parameters differ from the header")

    # -- queries ----------------------------------------------------------

    @property
    def phrase_count(self) -> int:
        return self.phrase_bv.ones

    def bind(self, reference: Reference | Symbols) -> Reference:
        if reference is self._bound:
            return reference
        ref = Reference.wrap(reference, self.alphabet)
        check_reference(ref, self.ref_checksum, self.ref_len)
        if ref is reference:
            self._bound = ref
        return ref

    def _rel(self, p: int, erank: Callable[[int], int]) -> int:
        e = erank(p + 1) - 1
        words, width, mask = self._ep
        bit = e * width
        off = bit & 63
        u = words[bit >> 6] >> off
        if off + width > 64:
            u |= words[(bit >> 6) + 1] << (64 - off)
        u &= mask
        a = (u >> 1) ^ -(u & 1)
        if (self.explicit_bv.words[p >> 6] >> (p & 63)) & 1:
            return a
        words, width, mask = self._ap
        bit = (p - e - 1) * width
        off = bit & 63
        u = words[bit >> 6] >> off
        if off + width > 64:
            u |= words[(bit >> 6) + 1] << (64 - off)
        u &= mask
        return a + ((u >> 1) ^ -(u & 1))

    def phrase_of(self, i: int) -> PhraseView:
        if not 0 <= i < self.target_len:
            raise RangeError(f"position {i} outside 0..{self.target_len - 1}")
        p = self.phrase_bv.rank(i + 1) - 1
        start = self.phrase_bv.select(p + 1)
        nxt = self.phrase_bv.select(p + 2) if p + 1 < self.phrase_count else self.target_len
        return PhraseView(
            index=p,
            start=start,
            length=nxt - start,
            lit_len=self.counts[p],
            explicit=bool(self.explicit_bv[p]),
            rel=self._rel(p, self.explicit_bv.rank),
        )

    def rel_pointer(self, v: PhraseView) -> int:
        return self._rel(v.index, self.explicit_bv.rank)

    def access(self, reference: Reference | Symbols, i: int):
        """Symbol at target position ``i``."""
        ref = self.bind(reference)
        if not 0 <= i < self.target_len:
            raise RangeError(f"position {i} outside 0..{self.target_len - 1}")
        r, nxt = self.phrase_bv.rank_next(i + 1)
        p = r - 1
        copy_end = nxt - self.counts[p]
        if i >= copy_end:
            return self.literals[self.counts.prefix_sum(p) + i - copy_end]
        j = i + self._rel(p, self.explicit_bv.rank)
        if not 0 <= j < self.ref_len:
            raise CorruptArchiveError(f"position {i} maps outside the reference")
        return ref.data[j]

    def extract(self, reference: Reference | Symbols, i: int, length: int, probe: Optional[QueryProbe] = None):
        """Target symbols ``[i, i + length)``: ``bytes`` for DNA, else a list.

        One rank on the phrase bitvector locates the first phrase; later
        phrase boundaries come from select alone.
        """
        ref = reference if reference is self._bound else self.bind(reference)
        end = i + length
        if i < 0 or length < 0 or end > self.target_len:
            raise RangeError(f"range [{i}, {end}) outside 0..{self.target_len}")
        if length == 0:
            return join([], self.alphabet)
        if probe is None:
            r, nxt = self.phrase_bv.rank_next(i + 1)
            erank = self.explicit_bv.rank
        else:
            r, nxt = probe.wrap(self.phrase_bv.rank_next, "phrase_rank")(i + 1)
            erank = probe.wrap(self.explicit_bv.rank, "explicit_rank")
        p = r - 1
        cb, per, ml, cmask = self._cnt
        lit = (cb[p // per] >> ((p % per) * ml)) & cmask
        copy_end = nxt - lit
        if end <= copy_end:
            # the whole range sits inside one copy
            rel = self._rel(p, erank)
            if i + rel < 0 or end + rel > self.ref_len:
                raise CorruptArchiveError(f"phrase {p} maps outside the reference")
            return ref.data[i + rel : end + rel]
        select = self.phrase_bv.select
        if probe is not None:
            select = probe.wrap(select, "phrase_select")
        m = self.phrase_bv.ones
        counts = self.counts
        data = ref.data
        ref_len = self.ref_len
        lit_base = -1
        parts = []
        pos = i
        while True:
            if pos < copy_end:
                rel = self._rel(p, erank)
                e = copy_end if copy_end < end else end
                a = pos + rel
                b = e + rel
                if a < 0 or b > ref_len:
                    raise CorruptArchiveError(f"phrase {p} maps outside the reference")
                parts.append(data[a:b])
                pos = e
            if pos < end:
                if lit_base < 0:
                    lit_base = counts.prefix_sum(p)
                e = nxt if nxt < end else end
                parts.append(self.literals.run(lit_base + pos - copy_end, e - pos))
                pos = e
            if pos >= end:
                break
            if lit_base >= 0:
                lit_base += lit
            p += 1
            nxt = select(p + 2) if p + 1 < m else self.target_len
            lit = counts[p]
            copy_end = nxt - lit
        return parts[0] if len(parts) == 1 else join(parts, self.alphabet)

    def decode(self, reference: Reference | Symbols):
        return self.extract(reference, 0, self.target_len)

    # -- reporting --------------------------------------------------------

    def components(self) -> dict[str, int]:
        """Payload bits per component."""
        return {
            "phrase_bv": self.phrase_bv.size_bits(),
            "explicit_bv": self.explicit_bv.size_bits(),
            "explicit_ptrs": self.explicit_ptrs.size_bits(),
            "adaptive_ptrs": self.adaptive_ptrs.size_bits(),
            "literal_counts": self.counts.size_bits(),
            "literals": self.literals.size_bits(),
        }

    def stats(self) -> dict:
        comps = self.components()
        total = sum(comps.values())
        m = self.phrase_count
        explicit = self.explicit_bv.ones
        return {
            "scheme": self.scheme,
            "target_len": self.target_len,
            "phrases": m,
            "explicit_phrases": explicit,
            "adaptive_phrases": m - explicit,
            "literals": len(self.literals),
            "payload_bits": total,
            "bits_per_symbol": total / self.target_len if self.target_len else 0.0,
            "components": comps,
        }


def encode(p: Parsing, reference: Reference | Symbols, alphabet: str | None = None) -> RlzapArchive:
    return RlzapArchive.encode(p, reference, alphabet)


def phrases_of(archive: RlzapArchive) -> list[Phrase]:
    """Decode the phrase list back out of an archive (test and report helper)."""
    out: list[Phrase] = []
    m = archive.phrase_count
    for p in range(m):
        start = archive.phrase_bv.select(p + 1)
        nxt = archive.phrase_bv.select(p + 2) if p + 1 < m else archive.target_len
        lit = archive.counts[p]
        explicit = bool(archive.explicit_bv[p])
        rel = archive._rel(p, archive.explicit_bv.rank)
        base = rel if explicit else out[-1].rel - out[-1].delta
        out.append(Phrase(start, nxt - start - lit, lit, explicit, rel, 0 if explicit else rel - base))
    return out
