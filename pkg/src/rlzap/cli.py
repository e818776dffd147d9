"""Command-line front end: ``compress``, ``extract``, ``bench`` and ``info``."""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from pathlib import Path
from typing import Sequence

from rlzap import io
from rlzap.archive import RlzapArchive
from rlzap.baselines import gdc_parse, relptr_build, rlz_parse
from rlzap.errors import (
    EncodingError,
    FormatError,
    IngestionError,
    InvalidInputError,
    RangeError,
    ReferenceMismatchError,
    RlzapError,
)
from rlzap.matcher import Matcher
from rlzap.parser import ParseParams, parse
from rlzap.reference import DNA, INT, Reference, join

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INGEST = 3
EXIT_FORMAT = 4
EXIT_CHECKSUM = 5
EXIT_RANGE = 6
EXIT_ENCODE = 7

DEFAULT_LENGTHS = (1, 4, 16, 64, 256, 1024)
DEFAULT_QUERIES = 1 << 20

_KIND = {DNA: io.DNA_BYTES, INT: io.U32_DLCP}
_SYMBOL_BYTES = {DNA: 1, INT: 4}


class UsageError(RlzapError):
    pass


def _exit_code(err: Exception) -> int:
    if isinstance(err, IngestionError):
        return EXIT_INGEST
    if isinstance(err, (UsageError, InvalidInputError)):
        return EXIT_USAGE
    if isinstance(err, FormatError):
        return EXIT_FORMAT
    if isinstance(err, ReferenceMismatchError):
        return EXIT_CHECKSUM
    if isinstance(err, RangeError):
        return EXIT_RANGE
    if isinstance(err, EncodingError):
        return EXIT_ENCODE
    return 1


def params_for(alphabet: str, **overrides) -> ParseParams:
    """Default parse parameters for ``alphabet`` with the non-None overrides applied."""
    given = {k: v for k, v in overrides.items() if v is not None}
    return ParseParams.dna(**given) if alphabet == DNA else ParseParams.dlcp(**given)


def build(scheme: str, target, reference: Reference, params: ParseParams):
    """Compress ``target`` with one of the four schemes."""
    if scheme == "rlzap":
        p = parse(target, reference.data, params)
        return RlzapArchive.encode(p, reference)
    ms = Matcher(target, reference.data)
    if scheme == "rlz":
        return rlz_parse(target, reference, matcher=ms, alphabet=reference.alphabet)
    g = gdc_parse(target, reference, matcher=ms, alphabet=reference.alphabet, chunk_len=params.chunk_len)
    return g if scheme == "gdc" else relptr_build(g)


def bench(archive, reference: Reference, lengths: Sequence[int] = DEFAULT_LENGTHS,
          queries: int = DEFAULT_QUERIES, seed: int = 0) -> list[dict]:
    """Mean extraction time per symbol for each substring length.

    For length ``l`` this times ``ceil(queries / l)`` extractions at start
    positions drawn uniformly from a generator seeded with ``seed``.
    """
    n = archive.target_len
    rows = []
    for length in lengths:
        if length < 1:
            raise UsageError(f"bench length must be positive, got {length}")
        if length > n:
            rows.append({"length": length, "queries": 0, "ns_per_symbol": None})
            continue
        count = math.ceil(queries / length)
        rng = random.Random(f"{seed}:{length}")
        starts = [rng.randrange(n - length + 1) for _ in range(count)]
        extract = archive.extract
        t0 = time.perf_counter_ns()
        for s in starts:
            extract(reference, s, length)
        dt = time.perf_counter_ns() - t0
        rows.append({"length": length, "queries": count, "ns_per_symbol": dt / (count * length)})
    return rows


def _read(path: str, alphabet: str):
    return io.read_dataset(path, _KIND[alphabet])


def _reference_for(path: str, archive) -> Reference:
    ref = Reference(_read(path, archive.alphabet), archive.alphabet)
    return Reference.wrap(archive.bind(ref))


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _table(rows: list[tuple[str, str]]) -> str:
    w = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows)


def cmd_compress(args) -> int:
    if len(args.input) > 1 and not args.concat:
        raise UsageError("several inputs given; pass --concat to compress their concatenation")
    alphabet = args.alphabet
    params = params_for(
        alphabet,
        look_ahead=args.look_ahead,
        min_explicit_length=args.min_explicit,
        delta_bits=args.delta_bits,
        max_lit=args.max_lit,
        sample_interval=args.sample_interval,
        chunk_len=args.chunk_len,
    )
    reference = Reference(_read(args.ref, alphabet), alphabet)
    parts = [_read(p, alphabet) for p in args.input]
    target = join(parts, alphabet) if alphabet == DNA else join([list(map(int, p)) for p in parts], alphabet)
    if len(target) == 0:
        raise IngestionError("input is empty")
    archive = build(args.scheme, target, reference, params)
    size = io.save(archive, args.output)
    st = archive.stats()
    input_bytes = len(target) * _SYMBOL_BYTES[alphabet]
    report = {
        **st,
        "input_symbols": len(target),
        "input_bytes": input_bytes,
        "archive_bytes": size,
        "archive_bits_per_symbol": 8 * size / len(target),
        "output": str(args.output),
    }
    rows = [
        ("scheme", args.scheme),
        ("input", f"{len(target)} symbols ({input_bytes} bytes)"),
        ("compressed", f"{size} bytes"),
        ("bits/symbol", f"{8 * size / len(target):.4f} (payload {st['bits_per_symbol']:.4f})"),
        ("phrases", str(st["phrases"])),
    ]
    if "explicit_phrases" in st:
        rows.append(("explicit/adaptive", f"{st['explicit_phrases']}/{st['adaptive_phrases']}"))
        rows.append(("literals", str(st["literals"])))
    _emit(args, report, _table(rows))
    return EXIT_OK


def cmd_extract(args) -> int:
    archive = io.load(args.archive)
    ref = _reference_for(args.ref, archive)
    if args.pos < 1:
        raise RangeError(f"positions are 1-based, got {args.pos}")
    length = archive.target_len - args.pos + 1 if args.len is None else args.len
    out = archive.extract(ref, args.pos - 1, length)
    sys.stdout.buffer.write(io.write_symbols(out, archive.alphabet))
    sys.stdout.buffer.flush()
    return EXIT_OK


def cmd_bench(args) -> int:
    archive = io.load(args.archive)
    ref = _reference_for(args.ref, archive)
    rows = bench(archive, ref, args.lengths, args.queries, args.seed)
    payload = {"scheme": archive.scheme, "target_len": archive.target_len, "seed": args.seed,
               "queries": args.queries, "rows": rows}
    head = "scheme".ljust(8) + "".join(f"{r['length']:>10}" for r in rows)
    vals = "".join(f"{r['ns_per_symbol']:>10.1f}" if r["ns_per_symbol"] is not None else f"{'-':>10}" for r in rows)
    text = "mean extraction time per symbol (ns)\n" + head + "\n" + archive.scheme.ljust(8) + vals
    _emit(args, payload, text)
    return EXIT_OK


def cmd_info(args) -> int:
    data = Path(args.archive).read_bytes()
    header = io.read_header(data)
    archive = io.deserialize(data)
    st = archive.stats()
    params = header.params.__dict__ if header.params is not None else None
    payload = {
        "scheme": header.scheme,
        "alphabet": header.alphabet,
        "archive_bytes": header.total_len,
        "target_len": header.target_len,
        "ref_len": header.ref_len,
        "ref_checksum": f"{header.ref_checksum:016x}",
        "params": params,
        "sections": header.section_sizes(),
        "stats": st,
    }
    rows = [
        ("scheme", header.scheme),
        ("alphabet", header.alphabet),
        ("archive bytes", str(header.total_len)),
        ("target length", str(header.target_len)),
        ("reference length", str(header.ref_len)),
        ("reference checksum", f"{header.ref_checksum:016x}"),
    ]
    if params:
        rows += [(f"param {k}", str(v)) for k, v in params.items()]
    rows += [(f"section {k}", f"{v} bytes") for k, v in header.section_sizes().items()]
    rows += [("phrases", str(st["phrases"]))]
    for key in ("explicit_phrases", "adaptive_phrases", "literals"):
        if key in st:
            rows.append((key.replace("_", " "), str(st[key])))
    rows.append(("payload bits/symbol", f"{st['bits_per_symbol']:.4f}"))
    _emit(args, payload, _table(rows))
    return EXIT_OK


def _lengths(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # keep argparse's message, use our exit code
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print machine-readable output")

    ap = _Parser(prog="rlzap", description="Relative Lempel-Ziv compression with adaptive pointers.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compress", parents=[common], help="compress a target against a reference")
    c.add_argument("--scheme", choices=("rlzap", "rlz", "gdc", "relptr"), default="rlzap")
    c.add_argument("--ref", required=True)
    c.add_argument("--input", required=True, nargs="+")
    c.add_argument("--output", required=True)
    c.add_argument("--alphabet", choices=(DNA, INT), default=DNA,
                   help="dna: raw ACGTN bytes; int: little-endian 32-bit signed entries")
    c.add_argument("--look-ahead", type=int)
    c.add_argument("--min-explicit", type=int)
    c.add_argument("--delta-bits", type=int)
    c.add_argument("--max-lit", type=int)
    c.add_argument("--sample-interval", type=int)
    c.add_argument("--chunk-len", type=int)
    c.add_argument("--concat", action="store_true", help="compress the concatenation of all inputs")
    c.set_defaults(func=cmd_compress)

    e = sub.add_parser("extract", parents=[common], help="write target symbols [pos, pos+len) to stdout")
    e.add_argument("--archive", required=True)
    e.add_argument("--ref", required=True)
    e.add_argument("--pos", type=int, default=1, help="1-based start position")
    e.add_argument("--len", type=int, help="number of symbols (default: to the end)")
    e.set_defaults(func=cmd_extract)

    b = sub.add_parser("bench", parents=[common], help="time random substring extraction")
    b.add_argument("--archive", required=True)
    b.add_argument("--ref", required=True)
    b.add_argument("--lengths", type=_lengths, default=list(DEFAULT_LENGTHS))
    b.add_argument("--queries", type=int, default=DEFAULT_QUERIES)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)

    i = sub.add_parser("info", parents=[common], help="describe an archive")
    i.add_argument("--archive", required=True)
    i.set_defaults(func=cmd_info)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except RlzapError as err:
        print(f"rlzap: {type(err).__name__}: {err}", file=sys.stderr)
        return _exit_code(err)
    except OSError as err:
        print(f"rlzap: {err}", file=sys.stderr)
        return EXIT_INGEST


if __name__ == "__main__":
    sys.exit(main())
