from __future__ import annotations

import bisect

import pytest

# The small reference/target pair used throughout the golden tests.
REF = b"ACATCATTCGAGGACAGGTATAGCTACAGTTAGAA"
TGT = b"ACATGATTCGACGACAGGTACTAGCTACAGTAGAA"


# PASS/FAIL lines recorded by the acceptance tests, echoed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def pair():
    return REF, TGT


def naive_rank(bits, i):
    return sum(bits[:i])


def naive_select(bits, k):
    seen = 0
    for pos, b in enumerate(bits):
        seen += b
        if b and seen == k:
            return pos
    raise AssertionError("k out of range")


def sorted_rank(positions, i):
    return bisect.bisect_left(positions, i)


def brute_match(target, reference, i):
    """(length, rel) of the leftmost longest reference match at target[i:]."""
    best, src = 0, 0
    n, m = len(target), len(reference)
    for k in range(m):
        length = 0
        while i + length < n and k + length < m and target[i + length] == reference[k + length]:
            length += 1
        if length > best:
            best, src = length, k
    return best, (src - i if best else 0)


def brute_stats(target, reference):
    return [brute_match(target, reference, i) for i in range(len(target))]


def straight_line_parse(target, reference, delta_bits, look_ahead, min_explicit, sigma_bits, max_lit):
    """Slow transcription of the parsing rules over precomputed match statistics.

    Returns phrases as (start, copy_len, lit_len, explicit, rel) tuples.
    """
    ms = brute_stats(target, reference)
    n = len(target)
    lo, hi = -(1 << (delta_bits - 1)), (1 << (delta_bits - 1)) - 1

    def ok(k, base):
        length, rel = ms[k]
        return length > 0 and length * sigma_bits > delta_bits and lo <= rel - base <= hi

    def adaptive_from(i, base):
        for k in range(i, min(i + look_ahead, n - 1) + 1):
            if ok(k, base):
                return k
        return None

    out = []  # [start, copy, lits, explicit, rel]
    cap = (1 << max_lit) - 1
    base = 0

    def add_literals(count, pos):
        nonlocal base
        while count:
            if not out:
                take = min(cap, count)
                out.append([pos, 0, take, True, 0])
            elif out[-1][2] < cap:
                take = min(cap - out[-1][2], count)
                out[-1][2] += take
            else:
                take = min(cap, count)
                out.append([pos, 0, take, False, base])
            pos += take
            count -= take

    i = 0
    while i < n:
        if out:
            k = adaptive_from(i, base)
            if k is not None:
                add_literals(k - i, i)
                out.append([k, ms[k][0], 0, False, ms[k][1]])
                i = k + ms[k][0]
                continue
        k = i
        while k < n:
            length, rel = ms[k]
            if length > min_explicit:
                break
            if length and k + length < n and adaptive_from(k + length, rel) is not None:
                break
            k += 1
        if k == n:
            add_literals(n - i, i)
            break
        add_literals(k - i, i)
        out.append([k, ms[k][0], 0, True, ms[k][1]])
        base = ms[k][1]
        i = k + ms[k][0]
    return [tuple(p) for p in out]


def parse_violations(p, target, reference):
    """Every broken validity rule of parsing ``p``; empty when the parse is sound."""
    errs = []
    params = p.params
    cap = (1 << params.max_lit) - 1
    lo, hi = -(1 << (params.delta_bits - 1)), (1 << (params.delta_bits - 1)) - 1
    t = list(target)
    r = list(reference)
    pos = 0
    base = None
    for k, ph in enumerate(p.phrases):
        if ph.start != pos:
            errs.append(f"phrase {k} starts at {ph.start}, expected {pos}")
        if ph.copy_len + ph.lit_len < 1:
            errs.append(f"phrase {k} is empty")
        if ph.lit_len > cap:
            errs.append(f"phrase {k} has {ph.lit_len} literals")
        src = ph.start + ph.rel
        if ph.copy_len and (src < 0 or t[ph.start : ph.start + ph.copy_len] != r[src : src + ph.copy_len]):
            errs.append(f"phrase {k} copy does not match the reference")
        if k == 0 and not ph.explicit:
            errs.append("first phrase is not explicit")
        if ph.explicit:
            base = ph.rel
        elif base is not None:
            if ph.rel - base != ph.delta or not lo <= ph.delta <= hi:
                errs.append(f"phrase {k} delta {ph.delta} invalid for base {base}")
        pos = ph.start + ph.length
    if pos != len(t):
        errs.append(f"phrases cover {pos} of {len(t)} symbols")
    return errs
