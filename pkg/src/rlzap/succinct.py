"""Bit-level primitives: packed integer arrays, rank/select bitvectors,
the sampled literal counter and the chunked exception bitvector.

Conventions used throughout:

* positions are 0-based;
* ``rank(i)`` counts the 1s in positions ``[0, i)``, so ``rank(i)`` here
  equals the 1-based ``rank(i)`` of the textbook definition;
* ``select(k)`` takes a 1-based rank ``k`` and returns the 0-based position
  of the k-th 1;
* bits are stored least-significant-bit first inside little-endian 64-bit
  words.
"""

from __future__ import annotations

import sys
from array import array
from typing import Iterable, Sequence

import numpy as np

from rlzap.errors import CorruptArchiveError, InvalidInputError, RangeError
from rlzap.wire import Reader, Writer

_MASK64 = (1 << 64) - 1

if sys.byteorder != "little":  # pragma: no cover
    raise ImportError("rlzap assumes a little-endian host")


def _sel8_table() -> list[int]:
    # _SEL8[byte * 8 + r] = offset of the r-th set bit of byte
    table = [0] * (256 * 8)
    for b in range(256):
        r = 0
        for off in range(8):
            if b >> off & 1:
                table[b * 8 + r] = off
                r += 1
    return table


_SEL8 = _sel8_table()


def select_in_word(word: int, r: int) -> int:
    """Offset of the ``r``-th (0-based) set bit of a 64-bit word."""
    base = 0
    c = (word & 0xFFFFFFFF).bit_count()
    if r >= c:
        r -= c
        word >>= 32
        base = 32
    c = (word & 0xFFFF).bit_count()
    if r >= c:
        r -= c
        word >>= 16
        base += 16
    c = (word & 0xFF).bit_count()
    if r >= c:
        r -= c
        word >>= 8
        base += 8
    return base + _SEL8[(word & 0xFF) * 8 + r]


def zigzag(v: int) -> int:
    return (v << 1) if v >= 0 else ((-v << 1) - 1)


def unzigzag(u: int) -> int:
    return (u >> 1) if not u & 1 else -((u + 1) >> 1)


def bits_needed(v: int) -> int:
    """Minimal binary width for the non-negative value ``v`` (at least 1)."""
    return max(1, v.bit_length())


# ---------------------------------------------------------------------------
# Packed fixed-width integers
# ---------------------------------------------------------------------------


class PackedArray:
    """Fixed-width unsigned integers packed into 64-bit words.

    Elements may straddle word boundaries. ``width`` is 1..64.
    """

    __slots__ = ("width", "count", "words", "_mask")

    def __init__(self, width: int, count: int = 0, words: array | None = None):
        if not 1 <= width <= 64:
            raise ValueError(f"width must be in 1..64, got {width}")
        self.width = width
        self.count = count
        nwords = (count * width + 63) >> 6
        if words is None:
            words = array("Q", bytes(8 * nwords))
        elif len(words) != nwords:
            raise CorruptArchiveError(
                f"packed array: {len(words)} words for {count}x{width} bits"
            )
        self.words = words
        self._mask = (1 << width) - 1

    @classmethod
    def from_values(cls, values: Sequence[int] | np.ndarray, width: int | None = None) -> "PackedArray":
        vals = np.asarray(values, dtype=np.uint64)
        if width is None:
            width = bits_needed(int(vals.max())) if len(vals) else 1
        pa = cls(width, len(vals))
        if len(vals):
            if int(vals.max()) >> width:
                raise ValueError(f"value does not fit in {width} bits")
            pa.words = array("Q", _pack_numpy(vals, width).tobytes())
        return pa

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, k: int) -> int:
        if not 0 <= k < self.count:
            raise RangeError(f"index {k} outside 0..{self.count - 1}")
        bit = k * self.width
        w = bit >> 6
        off = bit & 63
        v = self.words[w] >> off
        if off + self.width > 64:
            v |= self.words[w + 1] << (64 - off)
        return v & self._mask

    get = __getitem__

    def __setitem__(self, k: int, v: int) -> None:
        if not 0 <= k < self.count:
            raise RangeError(f"index {k} outside 0..{self.count - 1}")
        if v < 0 or v >> self.width:
            raise ValueError(f"value {v} does not fit in {self.width} bits")
        bit = k * self.width
        w = bit >> 6
        off = bit & 63
        words = self.words
        words[w] = (words[w] & ~(self._mask << off) & _MASK64) | ((v << off) & _MASK64)
        if off + self.width > 64:
            spill = off + self.width - 64
            hi_mask = (1 << spill) - 1
            words[w + 1] = (words[w + 1] & ~hi_mask & _MASK64) | (v >> (64 - off))

    def to_list(self) -> list[int]:
        return [self[k] for k in range(self.count)]

    def to_numpy(self) -> np.ndarray:
        return _unpack_numpy(np.frombuffer(self.words, dtype=np.uint64), self.width, self.count)

    def size_bits(self) -> int:
        return self.count * self.width

    def write(self, w: Writer) -> None:
        w.u64(self.count)
        w.u8(self.width)
        w.raw(self.words.tobytes())

    @classmethod
    def read(cls, r: Reader) -> "PackedArray":
        count = r.u64()
        width = r.u8()
        if not 1 <= width <= 64:
            raise CorruptArchiveError(f"packed array width {width}")
        nwords = (count * width + 63) >> 6
        words = array("Q")
        words.frombytes(r.take(8 * nwords))
        return cls(width, count, words)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PackedArray)
            and self.width == other.width
            and self.count == other.count
            and self.words == other.words
        )


def _pack_numpy(vals: np.ndarray, width: int) -> np.ndarray:
    n = len(vals)
    nwords = (n * width + 63) >> 6
    out = np.zeros(nwords + 1, dtype=np.uint64)
    bitpos = np.arange(n, dtype=np.uint64) * np.uint64(width)
    w = (bitpos >> np.uint64(6)).astype(np.int64)
    off = bitpos & np.uint64(63)
    np.bitwise_or.at(out, w, vals << off)
    spill = (off + np.uint64(width)) > np.uint64(64)
    if spill.any():
        sh = np.uint64(64) - off[spill]
        np.bitwise_or.at(out, w[spill] + 1, vals[spill] >> sh)
    return out[:nwords]


def _unpack_numpy(words: np.ndarray, width: int, count: int) -> np.ndarray:
    if count == 0:
        return np.zeros(0, dtype=np.uint64)
    padded = np.concatenate([words, np.zeros(1, dtype=np.uint64)])
    bitpos = np.arange(count, dtype=np.uint64) * np.uint64(width)
    w = (bitpos >> np.uint64(6)).astype(np.int64)
    off = bitpos & np.uint64(63)
    lo = padded[w] >> off
    # shifting a uint64 by 64 is undefined; split the shift in two
    hi = (padded[w + 1] << (np.uint64(63) - off)) << np.uint64(1)
    v = lo | hi
    if width < 64:
        v &= np.uint64((1 << width) - 1)
    return v


# ---------------------------------------------------------------------------
# Dense bitvector
# ---------------------------------------------------------------------------

_SUPER = 8  # words per superblock (512 bits)
_SAMPLE = 64  # select sampling rate, in 1s (or 0s)


class DenseBitvector:
    """Plain bitvector with constant-time rank and sampled select.

    The rank directory is two-level: absolute counts per 512-bit superblock
    and 16-bit relative counts per word. Only the raw bits are serialized;
    the directory is rebuilt on load.
    """

    __slots__ = ("length", "words", "ones", "_super", "_rel", "_sel1", "_sel0")

    def __init__(self, length: int, words: array):
        if len(words) != (length + 63) >> 6:
            raise CorruptArchiveError("dense bitvector word count mismatch")
        if length & 63 and words[-1] >> (length & 63):
            raise CorruptArchiveError("dense bitvector has bits past its length")
        self.length = length
        self.words = words
        self._build()

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str) -> "DenseBitvector":
        if isinstance(bits, str):
            bits = [1 if c == "1" else 0 for c in bits]
        b = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        return cls._from_bool(b)

    @classmethod
    def from_positions(cls, positions: Iterable[int], length: int) -> "DenseBitvector":
        b = np.zeros(length, dtype=np.uint8)
        pos = np.fromiter(positions, dtype=np.int64)
        if len(pos):
            if pos.min() < 0 or pos.max() >= length:
                raise RangeError("bit position outside bitvector")
            b[pos] = 1
        return cls._from_bool(b)

    @classmethod
    def _from_bool(cls, b: np.ndarray) -> "DenseBitvector":
        n = len(b)
        packed = np.packbits(b, bitorder="little")
        packed = np.concatenate([packed, np.zeros((-len(packed)) % 8, dtype=np.uint8)])
        return cls(n, array("Q", packed.tobytes()))

    def _build(self) -> None:
        words = self.words
        nw = len(words)
        pops = [w.bit_count() for w in words]
        sup = array("Q")
        rel = array("H")
        total = 0
        for i in range(nw):
            if i % _SUPER == 0:
                sup.append(total)
                base = total
            rel.append(total - base)
            total += pops[i]
        sup.append(total)
        self._super = sup
        self._rel = rel
        self.ones = total
        # select samples: word index holding the (j*_SAMPLE)-th one / zero
        sel1 = array("Q")
        sel0 = array("Q")
        c1 = 0
        c0 = 0
        n1 = 0
        n0 = 0
        for i in range(nw):
            p = pops[i]
            z = min(64, self.length - 64 * i) - p
            while n1 <= c1 + p - 1 and p:
                sel1.append(i)
                n1 += _SAMPLE
            while n0 <= c0 + z - 1 and z:
                sel0.append(i)
                n0 += _SAMPLE
            c1 += p
            c0 += z
        self._sel1 = sel1
        self._sel0 = sel0

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise RangeError(f"bit {i} outside 0..{self.length - 1}")
        return (self.words[i >> 6] >> (i & 63)) & 1

    def _ones_before_word(self, w: int) -> int:
        return self._super[w >> 3] + self._rel[w]

    def rank(self, i: int) -> int:
        """Number of 1s in positions ``[0, i)``."""
        if not 0 <= i <= self.length:
            raise RangeError(f"rank position {i} outside 0..{self.length}")
        w = i >> 6
        if w == len(self.words):
            return self.ones
        return self._super[w >> 3] + self._rel[w] + (self.words[w] & ((1 << (i & 63)) - 1)).bit_count()

    def rank0(self, i: int) -> int:
        return i - self.rank(i)

    def select(self, k: int) -> int:
        """Position of the k-th 1 (``k`` is 1-based)."""
        if not 1 <= k <= self.ones:
            raise RangeError(f"select({k}) with {self.ones} ones")
        t = k - 1
        w = self._sel1[t // _SAMPLE]
        sup, rel = self._super, self._rel
        nw = len(self.words)
        while w + 1 < nw and sup[(w + 1) >> 3] + rel[w + 1] <= t:
            w += 1
        return (w << 6) + select_in_word(self.words[w], t - sup[w >> 3] - rel[w])

    def select0(self, k: int) -> int:
        """Position of the k-th 0 (``k`` is 1-based)."""
        zeros = self.length - self.ones
        if not 1 <= k <= zeros:
            raise RangeError(f"select0({k}) with {zeros} zeros")
        t = k - 1
        w = self._sel0[t // _SAMPLE]
        sup, rel = self._super, self._rel
        nw = len(self.words)
        while w + 1 < nw and ((w + 1) << 6) - sup[(w + 1) >> 3] - rel[w + 1] <= t:
            w += 1
        zeros_before = (w << 6) - sup[w >> 3] - rel[w]
        return (w << 6) + select_in_word(~self.words[w] & _MASK64, t - zeros_before)

    def to_bits(self) -> list[int]:
        return [self[i] for i in range(self.length)]

    def __str__(self) -> str:
        return "".join(map(str, self.to_bits()))

    def size_bits(self) -> int:
        return self.length

    def write(self, w: Writer) -> None:
        w.u64(self.length)
        w.raw(self.words.tobytes())

    @classmethod
    def read(cls, r: Reader) -> "DenseBitvector":
        length = r.u64()
        words = array("Q")
        words.frombytes(r.take(8 * ((length + 63) >> 6)))
        return cls(length, words)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DenseBitvector) and self.length == other.length and self.words == other.words


# ---------------------------------------------------------------------------
# Sparse (Elias-Fano) bitvector
# ---------------------------------------------------------------------------


_SAMPLE_SHIFT = 2
_BUCKET_SAMPLE = 1 << _SAMPLE_SHIFT


class SparseBitvector:
    """Elias-Fano encoded set of 1-positions over a universe ``[0, n)``.

    Each position is split into ``low_bits`` low bits, stored verbatim, and a
    high part stored in unary in a dense bitvector: the k-th element sets bit
    ``(p >> low_bits) + k``.
    """

    __slots__ = ("universe", "ones", "low_bits", "low", "high", "_low_mask", "_starts", "_hw", "_lw")

    def __init__(self, universe: int, low_bits: int, low: PackedArray, high: DenseBitvector):
        self.universe = universe
        self.low_bits = low_bits
        self.low = low
        self.high = high
        self.ones = high.ones
        self._low_mask = (1 << low_bits) - 1
        if low_bits and low.count != self.ones:
            raise CorruptArchiveError("Elias-Fano low part size mismatch")
        if high.length != self.ones + (universe >> low_bits) + 1:
            raise CorruptArchiveError("Elias-Fano high part size mismatch")
        # first high slot of every _BUCKET_SAMPLE-th bucket, rebuilt on load
        bits = np.unpackbits(np.frombuffer(high.words.tobytes(), dtype=np.uint8), bitorder="little")
        zeros = np.flatnonzero(bits[: high.length] == 0)
        starts = [0] + (zeros[_BUCKET_SAMPLE - 1 :: _BUCKET_SAMPLE] + 1).tolist()
        self._starts = array("I" if high.length < 1 << 32 else "Q", starts)
        self._hw = high.words
        self._lw = low.words

    @classmethod
    def from_positions(cls, positions: Sequence[int] | np.ndarray, universe: int) -> "SparseBitvector":
        pos = np.asarray(positions, dtype=np.int64)
        m = len(pos)
        if m:
            if pos[0] < 0 or pos[-1] >= universe:
                raise RangeError("position outside universe")
            if m > 1 and not (np.diff(pos) > 0).all():
                raise ValueError("positions must be strictly increasing")
        if m:
            low_bits = max(0, (universe // m).bit_length() - 1)
        else:
            # all high buckets empty: one terminating bit is enough
            low_bits = universe.bit_length()
        if low_bits:
            low = PackedArray.from_values(pos & ((1 << low_bits) - 1), low_bits)
        else:
            low = PackedArray(1, 0)
        high_len = m + (universe >> low_bits) + 1
        high_pos = (pos >> low_bits) + np.arange(m, dtype=np.int64)
        high = DenseBitvector.from_positions(high_pos, high_len)
        return cls(universe, low_bits, low, high)

    def __len__(self) -> int:
        return self.universe

    def select(self, k: int) -> int:
        """Position of the k-th 1 (``k`` is 1-based)."""
        if not 1 <= k <= self.ones:
            raise RangeError(f"select({k}) with {self.ones} ones")
        h = self.high.select(k) - (k - 1)
        if self.low_bits:
            return (h << self.low_bits) | self.low[k - 1]
        return h

    def _bucket_start(self, hb: int) -> int:
        """Position in the high part of bucket ``hb``'s first slot."""
        s = self._starts[hb // _BUCKET_SAMPLE]
        z = hb % _BUCKET_SAMPLE
        if not z:
            return s
        words = self._hw
        w = s >> 6
        x = (~words[w] & _MASK64) >> (s & 63)
        c = x.bit_count()
        while z > c:
            z -= c
            w += 1
            s = w << 6
            x = ~words[w] & _MASK64
            c = x.bit_count()
        for _ in range(z - 1):
            x &= x - 1
        return s + (x & -x).bit_length()

    def rank(self, i: int) -> int:
        """Number of 1s in positions ``[0, i)``."""
        return self.rank_next(i)[0]

    def rank_next(self, i: int) -> tuple[int, int]:
        """``rank(i)`` and the position of the first 1 at or after ``i``
        (``universe`` if there is none), from a single bucket scan."""
        if not 0 <= i <= self.universe:
            raise RangeError(f"rank position {i} outside 0..{self.universe}")
        lb = self.low_bits
        hb = i >> lb
        words = self._hw
        # bucket start, inlined from _bucket_start for the common in-word case
        s = self._starts[hb >> _SAMPLE_SHIFT]
        z = hb & (_BUCKET_SAMPLE - 1)
        if z:
            x = (~words[s >> 6] & _MASK64) >> (s & 63)
            if x.bit_count() < z:
                s = self._bucket_start(hb)
            else:
                if z > 1:
                    x &= x - 1
                    if z > 2:
                        x &= x - 1
                s += (x & -x).bit_length()
        lo = s - hb
        # scan the bucket; a 0 closes it
        v = -1
        if lb:
            target = i & self._low_mask
            mask = self._low_mask
            lw = self._lw
            while (words[s >> 6] >> (s & 63)) & 1:
                bit = lo * lb
                off = bit & 63
                v = lw[bit >> 6] >> off
                if off + lb > 64:
                    v |= lw[(bit >> 6) + 1] << (64 - off)
                v &= mask
                if v >= target:
                    return lo, (hb << lb) | v
                lo += 1
                s += 1
        elif (words[s >> 6] >> (s & 63)) & 1:
            return lo, hb
        if lo == self.ones:
            return lo, self.universe
        # the next 1 lives in a later bucket
        w = s >> 6
        x = words[w] >> (s & 63)
        if x:
            s += (x & -x).bit_length() - 1
        else:
            w += 1
            while not words[w]:
                w += 1
            x = words[w]
            s = (w << 6) + (x & -x).bit_length() - 1
        if not lb:
            return lo, s - lo
        bit = lo * lb
        off = bit & 63
        v = lw[bit >> 6] >> off
        if off + lb > 64:
            v |= lw[(bit >> 6) + 1] << (64 - off)
        return lo, ((s - lo) << lb) | (v & mask)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.universe:
            raise RangeError(f"bit {i} outside 0..{self.universe - 1}")
        return self.rank(i + 1) - self.rank(i)

    def positions(self) -> list[int]:
        return [self.select(k) for k in range(1, self.ones + 1)]

    def size_bits(self) -> int:
        return (self.low.size_bits() if self.low_bits else 0) + self.high.size_bits()

    def write(self, w: Writer) -> None:
        w.u64(self.universe)
        w.u8(self.low_bits)
        self.low.write(w)
        self.high.write(w)

    @classmethod
    def read(cls, r: Reader) -> "SparseBitvector":
        universe = r.u64()
        low_bits = r.u8()
        if low_bits > 63:
            raise CorruptArchiveError(f"Elias-Fano low width {low_bits}")
        low = PackedArray.read(r)
        high = DenseBitvector.read(r)
        return cls(universe, low_bits, low, high)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SparseBitvector)
            and self.universe == other.universe
            and self.low_bits == other.low_bits
            and self.low == other.low
            and self.high == other.high
        )


# ---------------------------------------------------------------------------
# Literal counter
# ---------------------------------------------------------------------------


def _static_table(max_lit: int) -> list[int]:
    per = 8 // max_lit
    mask = (1 << max_lit) - 1
    return [sum((b >> (f * max_lit)) & mask for f in range(per)) for b in range(256)]


class LiteralCounter:
    """Per-phrase literal counts with sampled prefix sums.

    Counts take ``max_lit`` bits each (1, 2, 4 or 8), so ``8 // max_lit``
    counts share a byte. A prefix sum reads one sample and then sums whole
    bytes through a 256-entry table; ``sample_interval`` is a multiple of
    ``8 // max_lit`` so samples always start on a byte boundary.
    """

    __slots__ = ("max_lit", "sample_interval", "counts", "prefix", "_bytes", "_table", "_per", "_mask", "total")

    def __init__(self, max_lit: int, sample_interval: int, counts: PackedArray, prefix: PackedArray):
        check_counter_params(max_lit, sample_interval)
        if counts.width != max_lit:
            raise CorruptArchiveError("literal counter width mismatch")
        if prefix.count != counts.count // sample_interval + 1:
            raise CorruptArchiveError("literal counter sample count mismatch")
        self.max_lit = max_lit
        self.sample_interval = sample_interval
        self.counts = counts
        self.prefix = prefix
        self._bytes = counts.words.tobytes()
        self._table = _static_table(max_lit)
        self._per = 8 // max_lit
        self._mask = (1 << max_lit) - 1
        self.total = self.prefix_sum(counts.count)

    @classmethod
    def build(cls, counts: Sequence[int], max_lit: int, sample_interval: int) -> "LiteralCounter":
        check_counter_params(max_lit, sample_interval)
        c = np.asarray(counts, dtype=np.int64)
        if len(c) and (c.min() < 0 or c.max() > (1 << max_lit) - 1):
            raise ValueError(f"literal count exceeds 2^{max_lit} - 1")
        packed = PackedArray.from_values(c, max_lit)
        csum = np.concatenate([[0], np.cumsum(c)])
        samples = csum[:: sample_interval]
        prefix = PackedArray.from_values(samples)
        return cls(max_lit, sample_interval, packed, prefix)

    def __len__(self) -> int:
        return self.counts.count

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.counts.count:
            raise RangeError(f"phrase {j} outside 0..{self.counts.count - 1}")
        per = self._per
        return (self._bytes[j // per] >> ((j % per) * self.max_lit)) & self._mask

    def prefix_sum(self, j: int) -> int:
        """Sum of the first ``j`` counts."""
        if not 0 <= j <= self.counts.count:
            raise RangeError(f"prefix_sum({j}) outside 0..{self.counts.count}")
        si = self.sample_interval
        s = j // si
        total = self.prefix[s]
        per = self._per
        b0 = (s * si) // per
        b1 = j // per
        table = self._table
        buf = self._bytes
        if b1 > b0:
            total += sum(map(table.__getitem__, buf[b0:b1]))
        rem = j - b1 * per
        if rem:
            total += table[buf[b1] & ((1 << (rem * self.max_lit)) - 1)]
        return total

    def size_bits(self) -> int:
        return self.counts.size_bits() + self.prefix.size_bits()

    def write(self, w: Writer) -> None:
        w.u8(self.max_lit)
        w.u32(self.sample_interval)
        self.counts.write(w)
        self.prefix.write(w)

    @classmethod
    def read(cls, r: Reader) -> "LiteralCounter":
        max_lit = r.u8()
        si = r.u32()
        try:
            check_counter_params(max_lit, si)
        except ValueError as e:
            raise CorruptArchiveError(str(e)) from None
        return cls(max_lit, si, PackedArray.read(r), PackedArray.read(r))


def check_counter_params(max_lit: int, sample_interval: int) -> None:
    if max_lit not in (1, 2, 4, 8):
        raise InvalidInputError(f"MaxLit must be 1, 2, 4 or 8, got {max_lit}")
    if sample_interval <= 0 or sample_interval % (8 // max_lit):
        raise InvalidInputError(f"SampleInterval {sample_interval} is not a positive multiple of {8 // max_lit}")


# ---------------------------------------------------------------------------
# Chunked exception bitvector
# ---------------------------------------------------------------------------


class ChunkedExceptionBitvector:
    """Bitvector for sparse, clustered 1s.

    The universe is cut into chunks of ``chunk_len`` bits. A sparse bitvector
    marks the chunks holding at least one 1 and only those chunks' raw words
    are kept.
    """

    __slots__ = ("length", "chunk_len", "chunks", "words")

    def __init__(self, length: int, chunk_len: int, chunks: SparseBitvector, words: PackedArray):
        if not 8 <= chunk_len <= 64:
            raise CorruptArchiveError(f"chunk length {chunk_len}")
        if words.count != chunks.ones or (words.count and words.width != chunk_len):
            raise CorruptArchiveError("exception bitvector chunk table mismatch")
        if chunks.universe != (length + chunk_len - 1) // chunk_len:
            raise CorruptArchiveError("exception bitvector chunk universe mismatch")
        self.length = length
        self.chunk_len = chunk_len
        self.chunks = chunks
        self.words = words

    @classmethod
    def from_positions(cls, positions: Sequence[int] | np.ndarray, length: int, chunk_len: int) -> "ChunkedExceptionBitvector":
        if not 8 <= chunk_len <= 64:
            raise InvalidInputError(f"chunk length must be in 8..64, got {chunk_len}")
        pos = np.unique(np.asarray(positions, dtype=np.int64))
        if len(pos) and (pos[0] < 0 or pos[-1] >= length):
            raise RangeError("exception position outside universe")
        nchunks = (length + chunk_len - 1) // chunk_len
        cidx = pos // chunk_len
        marked, first = np.unique(cidx, return_index=True)
        vals = np.zeros(len(marked), dtype=np.uint64)
        slot = np.searchsorted(marked, cidx)
        np.bitwise_or.at(vals, slot, np.uint64(1) << (pos % chunk_len).astype(np.uint64))
        chunks = SparseBitvector.from_positions(marked, nchunks)
        words = PackedArray.from_values(vals, chunk_len) if len(vals) else PackedArray(chunk_len, 0)
        return cls(length, chunk_len, chunks, words)

    @classmethod
    def from_bits(cls, bits: Sequence[int], chunk_len: int) -> "ChunkedExceptionBitvector":
        b = np.asarray(bits, dtype=np.uint8)
        return cls.from_positions(np.flatnonzero(b), len(b), chunk_len)

    def __len__(self) -> int:
        return self.length

    def get(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise RangeError(f"bit {i} outside 0..{self.length - 1}")
        chunks = self.chunks
        if not chunks.ones:
            return 0
        c = i // self.chunk_len
        idx = chunks.rank(c)
        if idx < chunks.ones and chunks.select(idx + 1) == c:
            return (self.words[idx] >> (i - c * self.chunk_len)) & 1
        return 0

    __getitem__ = get

    def ones(self) -> int:
        return sum(w.bit_count() for w in self.words.to_list())

    def size_bits(self) -> int:
        return self.chunks.size_bits() + self.words.size_bits()

    def write(self, w: Writer) -> None:
        w.u64(self.length)
        w.u8(self.chunk_len)
        self.chunks.write(w)
        self.words.write(w)

    @classmethod
    def read(cls, r: Reader) -> "ChunkedExceptionBitvector":
        length = r.u64()
        chunk_len = r.u8()
        return cls(length, chunk_len, SparseBitvector.read(r), PackedArray.read(r))

