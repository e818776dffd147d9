"""Single-pass parsing with adaptive pointers and trailing literal runs.

A phrase copies ``copy_len`` symbols from the reference at relative offset
``rel`` (reference position minus target position) and then carries
``lit_len`` literal symbols. Explicit phrases store ``rel`` in full;
adaptive phrases store ``delta = rel - base`` where ``base`` is the offset
of the most recent explicit phrase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from rlzap.errors import CorruptParseError, InvalidInputError
from rlzap.matcher import Matcher, Symbols, as_int_array

MatchFn = Callable[[int], "tuple[int, int]"]


@dataclass(frozen=True)
class ParseParams:
    delta_bits: int = 2
    look_ahead: int = 32
    min_explicit_length: int = 32
    max_lit: int = 2
    sample_interval: int = 64
    chunk_len: int = 32
    sigma_bits: int = 2

    def __post_init__(self) -> None:
        if self.delta_bits < 1 or self.delta_bits > 32:
            raise InvalidInputError(f"DeltaBits must be in 1..32, got {self.delta_bits}")
        if self.look_ahead < 1:
            raise InvalidInputError(f"LookAhead must be >= 1, got {self.look_ahead}")
        if self.min_explicit_length < 0:
            raise InvalidInputError("MinExplicitLength must be >= 0")
        if self.max_lit not in (1, 2, 4, 8):
            raise InvalidInputError(f"MaxLit must be 1, 2, 4 or 8, got {self.max_lit}")
        if self.sample_interval < 1 or self.sample_interval % (8 // self.max_lit):
            raise InvalidInputError(
                f"SampleInterval must be a positive multiple of {8 // self.max_lit}, got {self.sample_interval}"
            )
        if not 8 <= self.chunk_len <= 64:
            raise InvalidInputError(f"chunk length must be in 8..64, got {self.chunk_len}")
        if self.sigma_bits < 1:
            raise InvalidInputError("SigmaBits must be >= 1")

    @property
    def max_literals(self) -> int:
        return (1 << self.max_lit) - 1

    @classmethod
    def dna(cls, **overrides) -> "ParseParams":
        return cls(**{**dict(delta_bits=2, look_ahead=32, min_explicit_length=32, sigma_bits=2), **overrides})

    @classmethod
    def dlcp(cls, **overrides) -> "ParseParams":
        return cls(**{**dict(delta_bits=4, look_ahead=8, min_explicit_length=4, sigma_bits=32, max_lit=4), **overrides})


@dataclass
class Phrase:
    start: int
    copy_len: int
    lit_len: int
    explicit: bool
    rel: int
    delta: int = 0

    @property
    def length(self) -> int:
        return self.copy_len + self.lit_len


@dataclass
class Parsing:
    phrases: list[Phrase]
    target_len: int
    params: ParseParams = field(default_factory=ParseParams)
    literals: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.phrases)

    @property
    def explicit_count(self) -> int:
        return sum(p.explicit for p in self.phrases)

    @property
    def literal_count(self) -> int:
        return sum(p.lit_len for p in self.phrases)


def fits_delta(delta: int, bits: int) -> bool:
    """True iff ``delta`` is representable in ``bits``-bit two's complement."""
    return -(1 << (bits - 1)) <= delta <= (1 << (bits - 1)) - 1


def adaptive_worth(match_len: int, params: ParseParams) -> bool:
    return match_len * params.sigma_bits > params.delta_bits


def _adaptive_ok(ms: MatchFn, k: int, base: int, params: ParseParams) -> bool:
    length, ptr = ms(k)
    return length > 0 and adaptive_worth(length, params) and fits_delta(ptr - base, params.delta_bits)


def try_adaptive_step(ms: MatchFn, i: int, base: int, params: ParseParams, n: int) -> Optional[tuple[int, int]]:
    """(literal run length, phrase start) of the next adaptive phrase, or None.

    Checks ``i`` itself, then the leftmost ``k`` in ``(i, i + LookAhead]``.
    """
    last = min(i + params.look_ahead, n - 1)
    for k in range(i, last + 1):
        if _adaptive_ok(ms, k, base, params):
            return k - i, k
    return None


def explicit_step(ms: MatchFn, i: int, params: ParseParams, n: int) -> Optional[tuple[int, int]]:
    """(literal run length, phrase start) of the next explicit phrase, or None.

    ``k`` qualifies when its match is longer than MinExplicitLength, or when
    the adaptive step would succeed right after its match using the match's
    own offset as base.
    """
    for k in range(i, n):
        length, ptr = ms(k)
        if length > params.min_explicit_length:
            return k - i, k
        if length and k + length < n and try_adaptive_step(ms, k + length, ptr, params, n) is not None:
            return k - i, k
    return None


class _Builder:
    def __init__(self, params: ParseParams):
        self.params = params
        self.phrases: list[Phrase] = []
        self.base = 0

    def literals(self, start: int, count: int) -> None:
        cap = self.params.max_literals
        pos = start
        while count:
            if not self.phrases:
                take = min(cap, count)
                self.phrases.append(Phrase(pos, 0, take, True, 0))
                self.base = 0
            else:
                last = self.phrases[-1]
                room = cap - last.lit_len
                if room:
                    take = min(room, count)
                    last.lit_len += take
                else:
                    take = min(cap, count)
                    self.phrases.append(Phrase(pos, 0, take, False, self.base, 0))
            pos += take
            count -= take

    def explicit(self, start: int, copy_len: int, rel: int) -> None:
        self.phrases.append(Phrase(start, copy_len, 0, True, rel))
        self.base = rel

    def adaptive(self, start: int, copy_len: int, rel: int) -> None:
        self.phrases.append(Phrase(start, copy_len, 0, False, rel, rel - self.base))


def parse_with(ms: MatchFn, n: int, params: ParseParams) -> Parsing:
    """Run the parser over a target of length ``n`` given its match oracle."""
    b = _Builder(params)
    i = 0
    forget = getattr(ms, "forget_before", None)
    while i < n:
        if forget is not None:
            forget(i)
        if b.phrases:
            step = try_adaptive_step(ms, i, b.base, params, n)
            if step is not None:
                lits, k = step
                b.literals(i, lits)
                length, ptr = ms(k)
                b.adaptive(k, length, ptr)
                i = k + length
                continue
        step = explicit_step(ms, i, params, n)
        if step is None:
            b.literals(i, n - i)
            break
        lits, k = step
        b.literals(i, lits)
        length, ptr = ms(k)
        b.explicit(k, length, ptr)
        i = k + length
    return Parsing(b.phrases, n, params)


def parse(target: Symbols, reference: Symbols, params: ParseParams | None = None, matcher: Matcher | None = None) -> Parsing:
    """Parse ``target`` against ``reference``."""
    params = params or ParseParams()
    if len(reference) == 0:
        raise InvalidInputError("reference must not be empty")
    if matcher is None:
        matcher = Matcher(target, reference)
    p = parse_with(matcher, matcher.n, params)
    p.literals = literals_of(p, target)
    return p


def decode_parsing(p: Parsing, reference: Symbols) -> list[int]:
    """Rebuild the target from a parsing and the reference."""
    target_literals = p.literals
    ref = as_int_array(reference).tolist()
    out: list[int] = []
    li = 0
    for ph in p.phrases:
        if ph.copy_len:
            a = ph.start + ph.rel
            if a < 0 or a + ph.copy_len > len(ref):
                raise CorruptParseError(f"phrase at {ph.start} copies outside the reference")
            out.extend(ref[a : a + ph.copy_len])
        if li + ph.lit_len > len(target_literals):
            raise CorruptParseError("parsing needs more literals than supplied")
        out.extend(target_literals[li : li + ph.lit_len])
        li += ph.lit_len
    if len(out) != p.target_len:
        raise CorruptParseError(f"decoded {len(out)} symbols, expected {p.target_len}")
    return out


def literals_of(p: Parsing, target: Symbols) -> list[int]:
    """Literal symbols of ``target`` in parse order."""
    t = as_int_array(target).tolist()
    out: list[int] = []
    for ph in p.phrases:
        if ph.lit_len:
            s = ph.start + ph.copy_len
            out.extend(t[s : s + ph.lit_len])
    return out
